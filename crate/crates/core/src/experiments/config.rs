//! Experiment configuration files.
//!
//! A config is a flat TOML table. Unknown keys are rejected, and so are
//! attack parameters that the selected attack does not use.
//!
//! ```toml
//! m = 25
//! n = 20000
//! d = 5
//! gate_factor = 2
//! code = "abstract"        # or repetition3, five13, surface3
//! attack = "fixed_budget"  # none | iid | fixed_budget | message_targeted
//! gates = 160
//! action = "pauli_x"
//! trials = 1000
//! seed = 7
//! ```

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Deserialize;

use crate::channel::AttackStrategy;
use crate::code::{CodeError, CodeId, CodeSpec};
use crate::pauli::EveAction;
use crate::protocol::ProtocolConfig;
use crate::sampling::GateFactor;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed config: {0}")]
    Parse(String),
    #[error("invalid config: {0}")]
    Invalid(String),
    #[error(transparent)]
    Code(#[from] CodeError),
}

/// Which code model the experiment uses.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum CodeChoice {
    Abstract,
    Concrete(CodeId),
}

impl FromStr for CodeChoice {
    type Err = CodeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "abstract" | "abstract_distance" => Ok(CodeChoice::Abstract),
            other => other.parse().map(CodeChoice::Concrete),
        }
    }
}

impl fmt::Display for CodeChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CodeChoice::Abstract => f.write_str("abstract"),
            CodeChoice::Concrete(id) => write!(f, "{id}"),
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Default)]
pub enum ReportFormat {
    #[default]
    Csv,
    JsonLines,
    Text,
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(ReportFormat::Csv),
            "jsonl" | "json-lines" | "json_lines" => Ok(ReportFormat::JsonLines),
            "text" | "txt" => Ok(ReportFormat::Text),
            other => Err(format!("unknown format {other:?} (expected csv, jsonl or text)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub protocol: ProtocolConfig,
    pub code: CodeChoice,
    pub attack: AttackStrategy,
    pub trials: usize,
    pub seed: u64,
    pub out_dir: Option<PathBuf>,
    pub format: ReportFormat,
}

impl Default for ExperimentConfig {
    /// M = 25, N = 20000, d = 5 with a Pauli-only adversary model, no attack.
    fn default() -> Self {
        Self {
            protocol: ProtocolConfig::new(25, 20_000, 5, GateFactor::Pauli),
            code: CodeChoice::Abstract,
            attack: AttackStrategy::None,
            trials: 1000,
            seed: 0,
            out_dir: None,
            format: ReportFormat::Csv,
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    m: Option<usize>,
    n: Option<usize>,
    d: Option<usize>,
    gate_factor: Option<u8>,
    code: Option<String>,
    attack: Option<String>,
    p_x: Option<f64>,
    p_y: Option<f64>,
    p_z: Option<f64>,
    p_meas_z: Option<f64>,
    p_meas_x: Option<f64>,
    gates: Option<usize>,
    action: Option<String>,
    trials: Option<usize>,
    seed: Option<u64>,
    out_dir: Option<PathBuf>,
    format: Option<String>,
    strict_margin: Option<bool>,
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        text.parse()
    }

    /// The code this config runs against.
    pub fn code_spec(&self) -> Result<CodeSpec, ConfigError> {
        Ok(match self.code {
            CodeChoice::Abstract => CodeSpec::abstract_distance(self.protocol.d, self.protocol.m)?,
            CodeChoice::Concrete(id) => CodeSpec::concrete(id)?,
        })
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.protocol.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        self.attack.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        if self.trials == 0 {
            return Err(ConfigError::Invalid("trials must be at least 1".into()));
        }
        let code = self.code_spec()?;
        if code.m != self.protocol.m || code.d != self.protocol.d {
            return Err(ConfigError::Invalid(format!(
                "code {} has M = {} and d = {}, config says M = {} and d = {}",
                self.code, code.m, code.d, self.protocol.m, self.protocol.d
            )));
        }
        let total = self.protocol.total();
        match self.attack {
            AttackStrategy::FixedBudget { gates, .. } if gates > total => Err(ConfigError::Invalid(format!(
                "budget of {gates} gates exceeds the {total} channel positions"
            ))),
            AttackStrategy::MessageTargeted { gates, .. } if gates > self.protocol.m => Err(ConfigError::Invalid(
                format!("budget of {gates} gates exceeds the {} message qubits", self.protocol.m),
            )),
            _ => Ok(()),
        }
    }
}

impl FromStr for ExperimentConfig {
    type Err = ConfigError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        let defaults = ExperimentConfig::default();

        let code: CodeChoice = match &raw.code {
            Some(s) => s.parse()?,
            None => CodeChoice::Abstract,
        };
        let (mut m, mut d) = (raw.m, raw.d);
        if let CodeChoice::Concrete(id) = code {
            let spec = CodeSpec::concrete(id)?;
            m.get_or_insert(spec.m);
            d.get_or_insert(spec.d);
        }
        let gate_factor = match raw.gate_factor {
            Some(g) => GateFactor::try_from(g).map_err(ConfigError::Invalid)?,
            None => defaults.protocol.gate_factor,
        };
        let protocol = ProtocolConfig {
            m: m.unwrap_or(defaults.protocol.m),
            n: raw.n.unwrap_or(defaults.protocol.n),
            d: d.unwrap_or(defaults.protocol.d),
            gate_factor,
            strict_margin: raw.strict_margin.unwrap_or(false),
        };

        let attack = parse_attack(&raw)?;
        let format = match &raw.format {
            Some(f) => f.parse().map_err(ConfigError::Invalid)?,
            None => ReportFormat::default(),
        };
        let cfg = ExperimentConfig {
            protocol,
            code,
            attack,
            trials: raw.trials.unwrap_or(defaults.trials),
            seed: raw.seed.unwrap_or(defaults.seed),
            out_dir: raw.out_dir,
            format,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

fn parse_attack(raw: &RawConfig) -> Result<AttackStrategy, ConfigError> {
    let kind = raw.attack.as_deref().unwrap_or("none").trim().to_ascii_lowercase();
    let probs = [
        ("p_x", raw.p_x),
        ("p_y", raw.p_y),
        ("p_z", raw.p_z),
        ("p_meas_z", raw.p_meas_z),
        ("p_meas_x", raw.p_meas_x),
    ];
    let any_prob = probs.iter().find(|(_, v)| v.is_some()).map(|(k, _)| *k);
    let budget_key = if raw.gates.is_some() {
        Some("gates")
    } else if raw.action.is_some() {
        Some("action")
    } else {
        None
    };
    let reject = |key: &str| ConfigError::Invalid(format!("key {key:?} is not used by attack {kind:?}"));

    match kind.as_str() {
        "none" => {
            if let Some(k) = any_prob.or(budget_key) {
                return Err(reject(k));
            }
            Ok(AttackStrategy::None)
        }
        "iid" => {
            if let Some(k) = budget_key {
                return Err(reject(k));
            }
            Ok(AttackStrategy::Iid {
                p_x: raw.p_x.unwrap_or(0.0),
                p_y: raw.p_y.unwrap_or(0.0),
                p_z: raw.p_z.unwrap_or(0.0),
                p_meas_z: raw.p_meas_z.unwrap_or(0.0),
                p_meas_x: raw.p_meas_x.unwrap_or(0.0),
            })
        }
        "fixed_budget" | "message_targeted" => {
            if let Some(k) = any_prob {
                return Err(reject(k));
            }
            let gates = raw
                .gates
                .ok_or_else(|| ConfigError::Invalid(format!("attack {kind:?} needs \"gates\"")))?;
            let action: EveAction = raw
                .action
                .as_deref()
                .unwrap_or("pauli_x")
                .parse()
                .map_err(ConfigError::Invalid)?;
            Ok(if kind == "fixed_budget" {
                AttackStrategy::FixedBudget { gates, action }
            } else {
                AttackStrategy::MessageTargeted { gates, action }
            })
        }
        other => Err(ConfigError::Invalid(format!(
            "unknown attack {other:?} (expected none, iid, fixed_budget or message_targeted)"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_takes_defaults() {
        let cfg: ExperimentConfig = "".parse().unwrap();
        assert_eq!(cfg, ExperimentConfig::default());
    }

    #[test]
    fn full_config() {
        let cfg: ExperimentConfig = r#"
            m = 25
            n = 2000
            d = 5
            gate_factor = 4
            attack = "fixed_budget"
            gates = 160
            action = "meas_z"
            trials = 10
            seed = 99
            format = "jsonl"
            strict_margin = true
        "#
        .parse()
        .unwrap();
        assert_eq!(cfg.protocol.gate_factor, GateFactor::Measurement);
        assert!(cfg.protocol.strict_margin);
        assert_eq!(
            cfg.attack,
            AttackStrategy::FixedBudget {
                gates: 160,
                action: EveAction::MeasZ
            }
        );
        assert_eq!(cfg.format, ReportFormat::JsonLines);
        assert_eq!((cfg.trials, cfg.seed), (10, 99));
    }

    #[test]
    fn concrete_code_fills_m_and_d() {
        let cfg: ExperimentConfig = "code = \"surface3\"\nn = 100".parse().unwrap();
        assert_eq!((cfg.protocol.m, cfg.protocol.d), (9, 3));
        let err = "code = \"surface3\"\nm = 25".parse::<ExperimentConfig>().unwrap_err();
        assert!(matches!(err, ConfigError::Invalid(_)), "{err}");
    }

    #[test]
    fn fails_closed() {
        for bad in [
            "bogus = 1",
            "m = 0",
            "d = 4",
            "gate_factor = 3",
            "trials = 0",
            "attack = \"none\"\np_x = 0.5",
            "attack = \"iid\"\ngates = 3",
            "attack = \"fixed_budget\"",
            "attack = \"fixed_budget\"\ngates = 5\np_y = 0.1",
            "attack = \"fixed_budget\"\ngates = 30000",
            "attack = \"message_targeted\"\ngates = 26",
            "attack = \"iid\"\np_x = 0.7\np_z = 0.7",
            "attack = \"teleport\"",
            "code = \"steane\"",
            "format = \"xml\"",
            "m = \"many\"",
        ] {
            assert!(bad.parse::<ExperimentConfig>().is_err(), "{bad:?} should be rejected");
        }
    }
}

//! Monte Carlo harness, bound sweeps and report output.

mod bounds;
mod config;
mod report;

pub use bounds::{exhaustive_grid, verify_bounds, worked_example, BoundCheck, BoundRow, GridPoint, Patterns, WorkedExample};
pub use config::{CodeChoice, ConfigError, ExperimentConfig, ReportFormat};
pub use report::{emit_report, summary_text, TrialRecord};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::channel::{make_attack_plan, targeted_attack_plan, transmit, AttackStrategy};
use crate::code::CodeSpec;
use crate::exec::Execution;
use crate::protocol::{alice_prepare, bob_process, domain_hash, ProtocolError, SharedKey, TrialResult};
use crate::sampling::{delta_for_acceptance, quantum_error_bound};

#[derive(Debug, thiserror::Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("trial {index}: {source}")]
    Trial {
        index: usize,
        #[source]
        source: ProtocolError,
    },
    #[error("writing report: {0}")]
    Io(#[from] std::io::Error),
    #[error("writing report: {0}")]
    Csv(#[from] csv::Error),
    #[error("writing report: {0}")]
    Json(#[from] serde_json::Error),
}

/// Seed for trial `index`, a hash of the master seed and the index. It does
/// not depend on the trial count or on scheduling.
pub fn trial_seed(master: u64, index: u64) -> u64 {
    let mut input = [0u8; 16];
    input[..8].copy_from_slice(&master.to_le_bytes());
    input[8..].copy_from_slice(&index.to_le_bytes());
    let h = domain_hash("epp/trial-seed", &input);
    u64::from_le_bytes(h[..8].try_into().expect("8 bytes"))
}

/// One full protocol execution: Alice prepares, Eve attacks, Bob decides.
pub fn run_trial(cfg: &ExperimentConfig, code: &CodeSpec, seed: u64) -> Result<TrialResult, ProtocolError> {
    let key = SharedKey::from_seed(seed);
    let mut rng = ChaCha8Rng::from_seed(domain_hash("epp/channel", &seed.to_le_bytes()));
    let (layout, msg) = alice_prepare(&cfg.protocol, &key)?;
    let plan = match cfg.attack {
        AttackStrategy::MessageTargeted { gates, action } => {
            targeted_attack_plan(layout.total(), &layout.message_positions(), gates, action, &mut rng)?
        }
        ref blind => make_attack_plan(blind, layout.total(), &mut rng)?,
    };
    let outcome = transmit(&layout.sampling_states, cfg.protocol.m, &layout.permutation, &plan, &mut rng)?;
    let mut result = bob_process(&outcome, &msg, &key, &cfg.protocol, code)?;
    result.seed = seed;
    Ok(result)
}

/// Aggregate statistics of a Monte Carlo run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AggregateReport {
    pub trials: usize,
    pub seed: u64,
    pub m: usize,
    pub n: usize,
    pub d: usize,
    pub gate_factor: u64,
    pub code: String,
    pub attack: String,
    pub accepted: usize,
    pub aborted: usize,
    pub accept_rate: f64,
    pub abort_rate: f64,
    pub mean_omega_hat: f64,
    pub stderr_omega_hat: f64,
    pub undetected_failures: usize,
    pub undetected_failure_rate: f64,
    /// Accepted trials whose true relative weight exceeded ω̂ + δ.
    pub sampling_failures: usize,
    pub sampling_failure_rate: f64,
    /// Slack with nothing observed: `(d−1)/(2·gf·M)`.
    pub bound_delta: f64,
    /// `ε_qu(bound_delta, N)`.
    pub bound_epsilon: f64,
    /// File name of the per-trial records, empty when none were written.
    pub records: String,
}

impl AggregateReport {
    fn from_trials(cfg: &ExperimentConfig, code: &CodeSpec, results: &[TrialResult]) -> Self {
        let t = results.len();
        let accepted = results.iter().filter(|r| r.accepted).count();
        let undetected = results.iter().filter(|r| r.undetected_failure()).count();
        let sampling = results.iter().filter(|r| r.sampling_failure()).count();
        let omegas: Vec<f64> = results.iter().map(TrialResult::omega_hat_f64).collect();
        let mean = omegas.iter().sum::<f64>() / t as f64;
        let stderr = if t > 1 {
            let var = omegas.iter().map(|w| (w - mean).powi(2)).sum::<f64>() / (t - 1) as f64;
            (var / t as f64).sqrt()
        } else {
            0.0
        };
        let p = &cfg.protocol;
        let bound_delta = delta_for_acceptance(p.m, 0.0, p.d, p.gate_factor);
        Self {
            trials: t,
            seed: cfg.seed,
            m: p.m,
            n: p.n,
            d: p.d,
            gate_factor: p.gate_factor.value(),
            code: code.name(),
            attack: describe_attack(&cfg.attack),
            accepted,
            aborted: t - accepted,
            accept_rate: accepted as f64 / t as f64,
            abort_rate: (t - accepted) as f64 / t as f64,
            mean_omega_hat: mean,
            stderr_omega_hat: stderr,
            undetected_failures: undetected,
            undetected_failure_rate: undetected as f64 / t as f64,
            sampling_failures: sampling,
            sampling_failure_rate: sampling as f64 / t as f64,
            bound_delta,
            bound_epsilon: quantum_error_bound(bound_delta, p.n).unwrap_or(1.0),
            records: String::new(),
        }
    }
}

pub fn describe_attack(a: &AttackStrategy) -> String {
    match a {
        AttackStrategy::None => "none".into(),
        AttackStrategy::Iid {
            p_x,
            p_y,
            p_z,
            p_meas_z,
            p_meas_x,
        } => format!("iid(p_x={p_x},p_y={p_y},p_z={p_z},p_meas_z={p_meas_z},p_meas_x={p_meas_x})"),
        AttackStrategy::FixedBudget { gates, action } => format!("fixed_budget({gates},{action:?})"),
        AttackStrategy::MessageTargeted { gates, action } => format!("message_targeted({gates},{action:?})"),
    }
}

/// Trials plus their aggregate.
#[derive(Clone, Debug, PartialEq)]
pub struct MonteCarloRun {
    pub report: AggregateReport,
    pub trials: Vec<TrialResult>,
}

/// Runs `cfg.trials` independent trials. Trial i always uses
/// `trial_seed(cfg.seed, i)`, so the result is identical for either
/// execution mode.
pub fn run_monte_carlo(cfg: &ExperimentConfig, exec: Execution) -> Result<MonteCarloRun, ExperimentError> {
    cfg.validate()?;
    let code = cfg.code_spec()?;
    let results = exec.map_indexed(cfg.trials, |i| run_trial(cfg, &code, trial_seed(cfg.seed, i as u64)));
    let trials = results
        .into_iter()
        .enumerate()
        .map(|(index, r)| r.map_err(|source| ExperimentError::Trial { index, source }))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(MonteCarloRun {
        report: AggregateReport::from_trials(cfg, &code, &trials),
        trials,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::EveAction;
    use crate::protocol::TrialOutcome;

    fn cfg(text: &str) -> ExperimentConfig {
        text.parse().unwrap()
    }

    #[test]
    fn seeds_are_stable_and_distinct() {
        assert_eq!(trial_seed(1, 2), trial_seed(1, 2));
        assert_ne!(trial_seed(1, 2), trial_seed(1, 3));
        assert_ne!(trial_seed(1, 2), trial_seed(2, 2));
    }

    #[test]
    fn no_attack_always_accepts() {
        let c = cfg("n = 500\ntrials = 200\nseed = 3");
        let run = run_monte_carlo(&c, Execution::default()).unwrap();
        assert_eq!(run.report.accept_rate, 1.0);
        assert_eq!(run.report.undetected_failure_rate, 0.0);
        assert!(run.trials.iter().all(|t| t.outcome == TrialOutcome::CorrectableSuccess));
    }

    #[test]
    fn modes_agree() {
        let c = cfg("n = 300\ntrials = 64\nseed = 11\nattack = \"fixed_budget\"\ngates = 12\naction = \"pauli_y\"");
        let a = run_monte_carlo(&c, Execution::Sequential).unwrap();
        let b = run_monte_carlo(&c, Execution::Parallel).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn trial_results_do_not_depend_on_trial_count() {
        let mut c = cfg("n = 200\nseed = 5\nattack = \"iid\"\np_z = 0.01");
        c.trials = 10;
        let short = run_monte_carlo(&c, Execution::Sequential).unwrap();
        c.trials = 30;
        let long = run_monte_carlo(&c, Execution::Sequential).unwrap();
        assert_eq!(short.trials[..], long.trials[..10]);
    }

    #[test]
    fn message_targeted_hits_only_message() {
        let c = cfg("n = 400\ntrials = 50\nattack = \"message_targeted\"\ngates = 2\naction = \"pauli_x\"");
        let run = run_monte_carlo(&c, Execution::default()).unwrap();
        for t in &run.trials {
            assert_eq!(t.sampling_flips, 0);
            assert_eq!(t.true_gates, 2);
            assert_eq!(t.true_weight, 2);
            assert!(t.accepted);
        }
        assert_eq!(run.report.undetected_failure_rate, 0.0);
    }

    #[test]
    fn concrete_code_runs() {
        let c = cfg("code = \"five13\"\nn = 300\ntrials = 40\nattack = \"iid\"\np_y = 0.002");
        let run = run_monte_carlo(&c, Execution::default()).unwrap();
        assert_eq!(run.report.code, "five13");
        for t in run.trials.iter().filter(|t| t.accepted && t.true_weight <= 1) {
            assert_eq!(t.outcome, TrialOutcome::Identity);
        }
    }

    #[test]
    fn report_fields() {
        let c = cfg("n = 100\ntrials = 20\nattack = \"fixed_budget\"\ngates = 125\naction = \"pauli_x\"");
        let run = run_monte_carlo(&c, Execution::default()).unwrap();
        let r = &run.report;
        assert_eq!(r.accepted + r.aborted, 20);
        assert!((r.accept_rate + r.abort_rate - 1.0).abs() < 1e-15);
        assert!((r.bound_delta - 0.04).abs() < 1e-15);
        assert_eq!(r.bound_epsilon, 1.0);
        assert_eq!(describe_attack(&AttackStrategy::FixedBudget { gates: 1, action: EveAction::MeasX }), "fixed_budget(1,MeasX)");
    }
}

//! The one-way purification protocol: Alice's preparation, the keyed
//! permutation, the classical message and Bob's accept/abort decision.
//!
//! The shared key stands in for an ideal authenticated, confidential
//! classical channel. Everything in the [`ClassicalMessage`] is derived from
//! the key and the agreed configuration, so Bob can check a received message
//! by regenerating it.

use num_rational::Ratio;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::channel::{prepare_sampling_states, ChannelError, ChannelOutcome, Permutation};
use crate::code::{abstract_accepts, decode_and_classify, AbstractOutcome, CodeModel, CodeSpec, LogicalEffect};
use crate::pauli::BasisState;
use crate::sampling::{delta_for_acceptance, quantum_error_bound, ratio_to_f64, GateFactor};

pub const MIN_KEY_BYTES: usize = 16;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ProtocolError {
    #[error("shared key must be at least {MIN_KEY_BYTES} bytes, got {0}")]
    ShortKey(usize),
    #[error("invalid protocol config: {0}")]
    Config(String),
    #[error("outcome has {got} {what}, expected {expected}")]
    Dimension { what: &'static str, got: usize, expected: usize },
    #[error(transparent)]
    Channel(#[from] ChannelError),
}

/// Pre-shared secret. Never visible to channel or attack code.
#[derive(Clone, PartialEq, Eq)]
pub struct SharedKey(Vec<u8>);

impl std::fmt::Debug for SharedKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "SharedKey({} bytes)", self.0.len())
    }
}

impl SharedKey {
    pub fn new(bytes: impl Into<Vec<u8>>) -> Result<Self, ProtocolError> {
        let bytes = bytes.into();
        if bytes.len() < MIN_KEY_BYTES {
            return Err(ProtocolError::ShortKey(bytes.len()));
        }
        Ok(Self(bytes))
    }

    /// 32-byte key derived from a seed, for simulations.
    pub fn from_seed(seed: u64) -> Self {
        Self(domain_hash("epp/key", &seed.to_le_bytes()).to_vec())
    }

    fn stream(&self, label: &str, total: usize) -> ChaCha8Rng {
        let mut input = self.0.clone();
        input.extend_from_slice(&(total as u64).to_le_bytes());
        ChaCha8Rng::from_seed(domain_hash(label, &input))
    }
}

pub(crate) fn domain_hash(label: &str, data: &[u8]) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update((label.len() as u64).to_le_bytes());
    h.update(label.as_bytes());
    h.update(data);
    h.finalize().into()
}

/// Uniform permutation of `total` positions, fixed by the key.
pub fn keyed_permutation(key: &SharedKey, total: usize) -> Permutation {
    let mut map: Vec<usize> = (0..total).collect();
    map.shuffle(&mut key.stream("epp/permutation", total));
    Permutation::from_vec(map).expect("a shuffle is a bijection")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProtocolConfig {
    /// Message qubits (physical qubits of the code).
    pub m: usize,
    /// Sampling qubits.
    pub n: usize,
    pub d: usize,
    pub gate_factor: GateFactor,
    /// Also require a positive slack δ before accepting.
    pub strict_margin: bool,
}

impl ProtocolConfig {
    pub fn new(m: usize, n: usize, d: usize, gate_factor: GateFactor) -> Self {
        Self {
            m,
            n,
            d,
            gate_factor,
            strict_margin: false,
        }
    }

    pub fn validate(&self) -> Result<(), ProtocolError> {
        if self.m == 0 {
            return Err(ProtocolError::Config("M must be at least 1".into()));
        }
        if self.n == 0 {
            return Err(ProtocolError::Config("N must be at least 1".into()));
        }
        if self.d < 3 || self.d.is_multiple_of(2) {
            return Err(ProtocolError::Config(format!("d must be odd and at least 3, got {}", self.d)));
        }
        Ok(())
    }

    pub fn total(&self) -> usize {
        self.m + self.n
    }

    pub fn correctable(&self) -> usize {
        (self.d - 1) / 2
    }
}

/// Where each register ends up on the channel.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChannelLayout {
    pub m: usize,
    pub sampling_states: Vec<BasisState>,
    pub permutation: Permutation,
}

/// Contents of one channel position.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Slot {
    Message(usize),
    Sampling { index: usize, state: BasisState },
}

impl ChannelLayout {
    pub fn total(&self) -> usize {
        self.permutation.len()
    }

    /// Slots in channel order.
    pub fn slots(&self) -> Vec<Slot> {
        let canonical: Vec<Slot> = (0..self.m)
            .map(Slot::Message)
            .chain(
                self.sampling_states
                    .iter()
                    .enumerate()
                    .map(|(index, &state)| Slot::Sampling { index, state }),
            )
            .collect();
        self.permutation.apply(&canonical)
    }

    /// Channel positions holding message qubits, in message-qubit order.
    pub fn message_positions(&self) -> Vec<usize> {
        (0..self.m).map(|i| self.permutation.position_of(i)).collect()
    }
}

/// Alice's classical message: permutation, sampling states, distance and
/// the declared adversary model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassicalMessage {
    permutation: Permutation,
    sampling_states: Vec<BasisState>,
    d: usize,
    gate_factor: GateFactor,
}

impl ClassicalMessage {
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn gate_factor(&self) -> GateFactor {
        self.gate_factor
    }

    pub fn sampling_count(&self) -> usize {
        self.sampling_states.len()
    }
}

/// Steps 1–3: encode, append sampling qubits, permute, and write the
/// classical message. Sampling states and permutation come from key-derived
/// streams, so the message is reproducible from (key, config).
pub fn alice_prepare(config: &ProtocolConfig, key: &SharedKey) -> Result<(ChannelLayout, ClassicalMessage), ProtocolError> {
    config.validate()?;
    let total = config.total();
    let permutation = keyed_permutation(key, total);
    let sampling_states = prepare_sampling_states(config.n, &mut key.stream("epp/sampling-states", total))?;
    let layout = ChannelLayout {
        m: config.m,
        sampling_states: sampling_states.clone(),
        permutation: permutation.clone(),
    };
    let msg = ClassicalMessage {
        permutation,
        sampling_states,
        d: config.d,
        gate_factor: config.gate_factor,
    };
    Ok((layout, msg))
}

/// Final state of a trial.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrialOutcome {
    Identity,
    LogicalX,
    LogicalY,
    LogicalZ,
    CorrectableSuccess,
    UncorrectableFailure,
    Aborted,
}

impl TrialOutcome {
    pub fn is_success(self) -> bool {
        matches!(self, TrialOutcome::Identity | TrialOutcome::CorrectableSuccess)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            TrialOutcome::Identity => "identity",
            TrialOutcome::LogicalX => "logical_x",
            TrialOutcome::LogicalY => "logical_y",
            TrialOutcome::LogicalZ => "logical_z",
            TrialOutcome::CorrectableSuccess => "correctable_success",
            TrialOutcome::UncorrectableFailure => "uncorrectable_failure",
            TrialOutcome::Aborted => "aborted",
        }
    }
}

impl From<LogicalEffect> for TrialOutcome {
    fn from(e: LogicalEffect) -> Self {
        match e {
            LogicalEffect::Identity => TrialOutcome::Identity,
            LogicalEffect::LogicalX => TrialOutcome::LogicalX,
            LogicalEffect::LogicalY => TrialOutcome::LogicalY,
            LogicalEffect::LogicalZ => TrialOutcome::LogicalZ,
        }
    }
}

impl From<AbstractOutcome> for TrialOutcome {
    fn from(o: AbstractOutcome) -> Self {
        match o {
            AbstractOutcome::CorrectableSuccess => TrialOutcome::CorrectableSuccess,
            AbstractOutcome::UncorrectableFailure => TrialOutcome::UncorrectableFailure,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AbortReason {
    /// Estimated gate count exceeds `(d−1)/2`.
    TooManyGates,
    /// `strict_margin` is on and the slack δ is not positive.
    NoMargin,
    /// The classical message does not match what the key regenerates.
    KeyMismatch,
}

/// Transcript of one protocol execution.
#[derive(Clone, Debug, PartialEq)]
pub struct TrialResult {
    pub seed: u64,
    pub sampling_flips: u64,
    pub sampling_count: u64,
    pub omega_hat: Ratio<u64>,
    pub delta: f64,
    pub epsilon_qu: f64,
    pub est_gates: Ratio<u64>,
    pub accepted: bool,
    pub abort_reason: Option<AbortReason>,
    /// Ground truth: weight of the Pauli error on the message qubits.
    pub true_weight: usize,
    /// Ground truth: adversarial actions that hit message qubits.
    pub true_gates: usize,
    /// Ground truth: the message qubits' relative Hamming weight.
    pub true_relative_weight: Ratio<u64>,
    /// Whether the true relative weight exceeds the saturating estimate ω̂ + δ.
    pub exceeds_margin: bool,
    pub correctable: usize,
    pub outcome: TrialOutcome,
}

impl TrialResult {
    pub fn omega_hat_f64(&self) -> f64 {
        ratio_to_f64(self.omega_hat)
    }

    pub fn est_gates_f64(&self) -> f64 {
        ratio_to_f64(self.est_gates)
    }

    /// Accepted although Eve's error exceeded what the code handles, or the
    /// decoded qubit carries a logical error.
    pub fn undetected_failure(&self) -> bool {
        self.accepted && (self.true_weight > self.correctable || !self.outcome.is_success())
    }

    /// Accepted while the true relative weight was above ω̂ + δ.
    pub fn sampling_failure(&self) -> bool {
        self.accepted && self.exceeds_margin
    }
}

/// Steps 4–6: check the classical message, estimate ω̂ from the sampling
/// qubits, decide, and correct if accepted.
pub fn bob_process(
    outcome: &ChannelOutcome,
    msg: &ClassicalMessage,
    key: &SharedKey,
    config: &ProtocolConfig,
    code: &CodeSpec,
) -> Result<TrialResult, ProtocolError> {
    config.validate()?;
    if code.m != config.m || code.d != config.d {
        return Err(ProtocolError::Config(format!(
            "code {} has M = {}, d = {} but config says M = {}, d = {}",
            code.name(),
            code.m,
            code.d,
            config.m,
            config.d
        )));
    }
    let n = outcome.sampling_flips.len();
    if n != config.n {
        return Err(ProtocolError::Dimension {
            what: "sampling outcomes",
            got: n,
            expected: config.n,
        });
    }
    if outcome.message_error.num_qubits() != config.m {
        return Err(ProtocolError::Dimension {
            what: "message qubits",
            got: outcome.message_error.num_qubits(),
            expected: config.m,
        });
    }

    let m = config.m as u64;
    let t = config.correctable();
    let true_weight = outcome.message_error.weight();
    let true_relative_weight = outcome.message_disturbance / m;
    // true ω > (d−1)/(2·gf·M)  ⇔  gf·(M·ω) > (d−1)/2
    let exceeds_margin = outcome.message_disturbance * (2 * config.gate_factor.value()) > Ratio::from_integer((config.d - 1) as u64);

    let mut result = TrialResult {
        seed: 0,
        sampling_flips: 0,
        sampling_count: n as u64,
        omega_hat: Ratio::from_integer(0),
        delta: 0.0,
        epsilon_qu: 1.0,
        est_gates: Ratio::from_integer(0),
        accepted: false,
        abort_reason: None,
        true_weight,
        true_gates: outcome.message_gates,
        true_relative_weight,
        exceeds_margin,
        correctable: t,
        outcome: TrialOutcome::Aborted,
    };

    let (_, expected) = alice_prepare(config, key)?;
    if &expected != msg {
        result.abort_reason = Some(AbortReason::KeyMismatch);
        return Ok(result);
    }

    let flips = outcome.sampling_flips.iter().filter(|&&b| b).count() as u64;
    let omega_hat = Ratio::new(flips, n as u64);
    let est_gates = omega_hat * (msg.gate_factor.value() * m);
    let delta = delta_for_acceptance(config.m, ratio_to_f64(omega_hat), msg.d, msg.gate_factor);
    result.sampling_flips = flips;
    result.omega_hat = omega_hat;
    result.est_gates = est_gates;
    result.delta = delta;
    result.epsilon_qu = quantum_error_bound(delta, n).unwrap_or(1.0);

    if !abstract_accepts(est_gates, msg.d) {
        result.abort_reason = Some(AbortReason::TooManyGates);
        return Ok(result);
    }
    if config.strict_margin && (delta.is_nan() || delta <= 0.0) {
        result.abort_reason = Some(AbortReason::NoMargin);
        return Ok(result);
    }

    result.accepted = true;
    result.outcome = match &code.model {
        CodeModel::AbstractDistance => AbstractOutcome::for_weight(true_weight, t).into(),
        CodeModel::Concrete(c) => decode_and_classify(c, &outcome.message_error).into(),
    };
    Ok(result)
}

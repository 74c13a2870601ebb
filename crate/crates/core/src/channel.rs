//! Quantum transport: sampling-state preparation, Eve's attack plans and the
//! Pauli-frame effect of a transmission.
//!
//! Positions handed to attack code are channel-order indices. Attack
//! strategies carry only rates and budgets, never the permutation or the
//! sampling states, so Eve is blind to which positions are sampling qubits.

use num_rational::Ratio;
use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::pauli::{flip_probability, BasisState, EveAction, FlipProbability, Pauli, PauliString};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ChannelError {
    #[error("at least one sampling qubit is required")]
    NoSamplingQubits,
    #[error("a transmission needs at least one position")]
    EmptyChannel,
    #[error("attack budget of {gates} gates exceeds the {total} available positions")]
    BudgetTooLarge { gates: usize, total: usize },
    #[error("invalid i.i.d. attack probabilities: {0}")]
    BadProbabilities(String),
    #[error("attack plan covers {plan} positions but the channel carries {expected}")]
    PlanLength { plan: usize, expected: usize },
    #[error("permutation is not a bijection on {0} positions")]
    NotABijection(usize),
    #[error("message-targeted attacks need the channel layout and cannot be planned blind")]
    NeedsLayout,
}

/// Bijection from canonical register index to channel position.
///
/// Canonical order puts the M message qubits first and the N sampling qubits after.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn identity(total: usize) -> Self {
        Self((0..total).collect())
    }

    pub fn from_vec(map: Vec<usize>) -> Result<Self, ChannelError> {
        let total = map.len();
        let mut seen = vec![false; total];
        for &p in &map {
            if p >= total || std::mem::replace(&mut seen[p], true) {
                return Err(ChannelError::NotABijection(total));
            }
        }
        Ok(Self(map))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Channel position of canonical index `i`.
    pub fn position_of(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.0.len()];
        for (i, &p) in self.0.iter().enumerate() {
            inv[p] = i;
        }
        Permutation(inv)
    }

    /// Reorders canonical-order items into channel order.
    pub fn apply<T: Clone>(&self, canonical: &[T]) -> Vec<T> {
        let inv = self.inverse();
        inv.0.iter().map(|&i| canonical[i].clone()).collect()
    }

    /// Reorders channel-order items back into canonical order.
    pub fn unapply<T: Clone>(&self, channel: &[T]) -> Vec<T> {
        self.0.iter().map(|&p| channel[p].clone()).collect()
    }
}

/// Eve's per-position actions, in channel order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AttackPlan {
    actions: Vec<EveAction>,
}

impl AttackPlan {
    pub fn new(actions: Vec<EveAction>) -> Self {
        Self { actions }
    }

    pub fn uniform(action: EveAction, total: usize) -> Self {
        Self::new(vec![action; total])
    }

    pub fn actions(&self) -> &[EveAction] {
        &self.actions
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    pub fn gate_count(&self) -> usize {
        self.actions.iter().filter(|&&a| a != EveAction::Identity).count()
    }
}

/// Adversary policy. Parameters only; no view of the layout.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AttackStrategy {
    None,
    /// Each position independently; the leftover probability is Identity.
    Iid {
        p_x: f64,
        p_y: f64,
        p_z: f64,
        p_meas_z: f64,
        p_meas_x: f64,
    },
    /// Exactly `gates` positions, chosen uniformly without replacement.
    FixedBudget { gates: usize, action: EveAction },
    /// Diagnostic only: `gates` message positions chosen uniformly. Placing
    /// these requires the layout, which a real adversary does not have, so
    /// [`make_attack_plan`] refuses it and the harness resolves it with
    /// [`targeted_attack_plan`].
    MessageTargeted { gates: usize, action: EveAction },
}

impl AttackStrategy {
    pub fn iid_single(action: EveAction, p: f64) -> Self {
        let mut probs = [0.0; 5];
        let slot = match action {
            EveAction::Identity => return AttackStrategy::None,
            EveAction::PauliX => 0,
            EveAction::PauliY => 1,
            EveAction::PauliZ => 2,
            EveAction::MeasZ => 3,
            EveAction::MeasX => 4,
        };
        probs[slot] = p;
        AttackStrategy::Iid {
            p_x: probs[0],
            p_y: probs[1],
            p_z: probs[2],
            p_meas_z: probs[3],
            p_meas_x: probs[4],
        }
    }

    pub fn validate(&self) -> Result<(), ChannelError> {
        if let AttackStrategy::Iid {
            p_x,
            p_y,
            p_z,
            p_meas_z,
            p_meas_x,
        } = *self
        {
            let ps = [p_x, p_y, p_z, p_meas_z, p_meas_x];
            if ps.iter().any(|p| !(0.0..=1.0).contains(p)) {
                return Err(ChannelError::BadProbabilities(format!("{ps:?} not all in [0, 1]")));
            }
            let sum: f64 = ps.iter().sum();
            if sum > 1.0 + 1e-12 {
                return Err(ChannelError::BadProbabilities(format!("sum {sum} exceeds 1")));
            }
        }
        Ok(())
    }
}

/// Builds Eve's plan over `total` channel positions.
pub fn make_attack_plan<R: Rng + ?Sized>(
    strategy: &AttackStrategy,
    total: usize,
    rng: &mut R,
) -> Result<AttackPlan, ChannelError> {
    if total == 0 {
        return Err(ChannelError::EmptyChannel);
    }
    strategy.validate()?;
    match *strategy {
        AttackStrategy::None => Ok(AttackPlan::uniform(EveAction::Identity, total)),
        AttackStrategy::Iid {
            p_x,
            p_y,
            p_z,
            p_meas_z,
            p_meas_x,
        } => {
            let table = [
                (p_x, EveAction::PauliX),
                (p_y, EveAction::PauliY),
                (p_z, EveAction::PauliZ),
                (p_meas_z, EveAction::MeasZ),
                (p_meas_x, EveAction::MeasX),
            ];
            let actions = (0..total)
                .map(|_| {
                    let u: f64 = rng.random();
                    let mut acc = 0.0;
                    for &(p, a) in &table {
                        acc += p;
                        if u < acc {
                            return a;
                        }
                    }
                    EveAction::Identity
                })
                .collect();
            Ok(AttackPlan::new(actions))
        }
        AttackStrategy::FixedBudget { gates, action } => {
            let targets: Vec<usize> = (0..total).collect();
            targeted_attack_plan(total, &targets, gates, action, rng)
        }
        AttackStrategy::MessageTargeted { .. } => Err(ChannelError::NeedsLayout),
    }
}

/// Places `gates` copies of `action` on positions drawn uniformly without
/// replacement from `targets`.
pub fn targeted_attack_plan<R: Rng + ?Sized>(
    total: usize,
    targets: &[usize],
    gates: usize,
    action: EveAction,
    rng: &mut R,
) -> Result<AttackPlan, ChannelError> {
    if total == 0 {
        return Err(ChannelError::EmptyChannel);
    }
    if gates > targets.len() {
        return Err(ChannelError::BudgetTooLarge {
            gates,
            total: targets.len(),
        });
    }
    let mut actions = vec![EveAction::Identity; total];
    for i in index::sample(rng, targets.len(), gates) {
        actions[targets[i]] = action;
    }
    Ok(AttackPlan::new(actions))
}

/// I.i.d. uniform choice over the four BB84 states.
pub fn prepare_sampling_states<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Vec<BasisState>, ChannelError> {
    if n == 0 {
        return Err(ChannelError::NoSamplingQubits);
    }
    Ok((0..n)
        .map(|_| BasisState::ALL[rng.random_range(0..4)])
        .collect())
}

/// What Bob's registers hold after the channel, in canonical order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChannelOutcome {
    /// One bit per sampling qubit: Bob's preparation-basis measurement disagreed.
    pub sampling_flips: Vec<bool>,
    /// Effective Pauli on the M message qubits.
    pub message_error: PauliString,
    /// Non-identity actions that hit message positions.
    pub message_gates: usize,
    /// Sum over message positions of the action's mean detection probability.
    /// Divided by M this is the message qubits' true relative Hamming weight.
    pub message_disturbance: Ratio<u64>,
}

/// Runs the channel: applies `plan` (channel order) to the message and
/// sampling registers placed by `permutation`, draws the sampling outcomes
/// and records the induced message error.
///
/// Measurements on message qubits act as dephasing: MeasZ leaves Z with
/// probability 1/2, MeasX leaves X with probability 1/2.
pub fn transmit<R: Rng + ?Sized>(
    sampling_states: &[BasisState],
    m: usize,
    permutation: &Permutation,
    plan: &AttackPlan,
    rng: &mut R,
) -> Result<ChannelOutcome, ChannelError> {
    let total = m + sampling_states.len();
    if permutation.len() != total {
        return Err(ChannelError::NotABijection(total));
    }
    if plan.len() != total {
        return Err(ChannelError::PlanLength {
            plan: plan.len(),
            expected: total,
        });
    }
    let canonical_at = permutation.inverse();

    let mut sampling_flips = vec![false; sampling_states.len()];
    let mut message_error = PauliString::identity(m);
    let mut message_gates = 0;
    let mut message_disturbance = Ratio::new(0u64, 1);

    for (pos, &action) in plan.actions().iter().enumerate() {
        let c = canonical_at.position_of(pos);
        if c < m {
            if action != EveAction::Identity {
                message_gates += 1;
                message_disturbance += action.mean_flip_probability();
            }
            let p = match action {
                EveAction::Identity => Pauli::I,
                EveAction::PauliX => Pauli::X,
                EveAction::PauliY => Pauli::Y,
                EveAction::PauliZ => Pauli::Z,
                EveAction::MeasZ => {
                    if rng.random::<bool>() {
                        Pauli::Z
                    } else {
                        Pauli::I
                    }
                }
                EveAction::MeasX => {
                    if rng.random::<bool>() {
                        Pauli::X
                    } else {
                        Pauli::I
                    }
                }
            };
            message_error.set(c, p);
        } else {
            let s = c - m;
            sampling_flips[s] = match flip_probability(action, sampling_states[s]) {
                FlipProbability::Zero => false,
                FlipProbability::One => true,
                FlipProbability::Half => rng.random::<bool>(),
            };
        }
    }

    Ok(ChannelOutcome {
        sampling_flips,
        message_error,
        message_gates,
        message_disturbance,
    })
}

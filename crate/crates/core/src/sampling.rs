//! Sampling error bounds, Hamming-weight estimation and the slack solvers.
//!
//! Closed forms are evaluated in `f64`. The enumeration oracle
//! [`exact_classical_failure`] works in exact rationals and is what the
//! closed-form classical bound is checked against.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// Largest number of k-subsets the exact oracle will enumerate.
pub const ENUMERATION_GUARD: u64 = 10_000_000;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum SamplingError {
    #[error("no sample was taken: the bit sequence is empty")]
    EmptySample,
    #[error("delta must be positive, got {0}")]
    NonPositiveDelta(f64),
    #[error("sample size k must be at least 1")]
    ZeroSampleSize,
    #[error("code saturated: slack delta = {0} is not positive, protocol must abort")]
    Saturated(f64),
    #[error("need 1 <= k < n, got n = {n}, k = {k}")]
    BadSubsetSize { n: usize, k: usize },
    #[error("C({n}, {k}) = {count} subsets exceeds the enumeration guard of {ENUMERATION_GUARD}; use Monte Carlo instead")]
    GuardExceeded { n: usize, k: usize, count: u64 },
}

/// Multiplier from estimated Hamming weight to estimated gate count.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum GateFactor {
    /// Adversary restricted to single-qubit Pauli gates.
    Pauli,
    /// Adversary that may also measure.
    Measurement,
}

impl GateFactor {
    pub fn value(self) -> u64 {
        match self {
            GateFactor::Pauli => 2,
            GateFactor::Measurement => 4,
        }
    }
}

impl TryFrom<u8> for GateFactor {
    type Error = String;

    fn try_from(v: u8) -> Result<Self, Self::Error> {
        match v {
            2 => Ok(GateFactor::Pauli),
            4 => Ok(GateFactor::Measurement),
            other => Err(format!("gate factor must be 2 or 4, got {other}")),
        }
    }
}

impl From<GateFactor> for u8 {
    fn from(g: GateFactor) -> u8 {
        g.value() as u8
    }
}

impl FromStr for GateFactor {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.trim()
            .parse::<u8>()
            .map_err(|e| e.to_string())
            .and_then(GateFactor::try_from)
    }
}

impl fmt::Display for GateFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value())
    }
}

/// Snapshot of one sampling round and the confidence it buys.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SamplingEstimate {
    pub omega_hat: f64,
    pub k: usize,
    pub m: usize,
    pub delta: f64,
    pub epsilon_qu: f64,
    pub gate_factor: GateFactor,
}

impl SamplingEstimate {
    /// Builds the estimate for a code of distance `d`, with the slack set to
    /// saturate the code. `epsilon_qu` is 1 when the slack is not positive.
    pub fn new(omega_hat: f64, k: usize, m: usize, d: usize, gate_factor: GateFactor) -> Self {
        let delta = delta_for_acceptance(m, omega_hat, d, gate_factor);
        let epsilon_qu = quantum_error_bound(delta, k).unwrap_or(1.0);
        Self {
            omega_hat,
            k,
            m,
            delta,
            epsilon_qu,
            gate_factor,
        }
    }
}

/// Fraction of ones in `bits`, exact.
pub fn relative_hamming_weight(bits: &[bool]) -> Result<Ratio<u64>, SamplingError> {
    if bits.is_empty() {
        return Err(SamplingError::EmptySample);
    }
    let ones = bits.iter().filter(|&&b| b).count() as u64;
    Ok(Ratio::new(ones, bits.len() as u64))
}

fn check_args(delta: f64, k: usize) -> Result<(), SamplingError> {
    if delta.is_nan() || delta <= 0.0 {
        return Err(SamplingError::NonPositiveDelta(delta));
    }
    if k == 0 {
        return Err(SamplingError::ZeroSampleSize);
    }
    Ok(())
}

/// `4·exp(−δ²k/3)` without clamping. Exceeds 1 when `δ²k` is small.
pub fn classical_error_bound_unclamped(delta: f64, k: usize) -> Result<f64, SamplingError> {
    check_args(delta, k)?;
    Ok(4.0 * (-delta * delta * k as f64 / 3.0).exp())
}

/// Failure bound for estimating a bit string's relative weight from a
/// uniformly random k-subset: `min(1, 4·exp(−δ²k/3))`.
pub fn classical_error_bound(delta: f64, k: usize) -> Result<f64, SamplingError> {
    classical_error_bound_unclamped(delta, k).map(|b| b.min(1.0))
}

/// `2·exp(−δ²k/6)` without clamping; the square root of the unclamped classical bound.
pub fn quantum_error_bound_unclamped(delta: f64, k: usize) -> Result<f64, SamplingError> {
    // Via the square root so that squaring reproduces the classical bound to 1 ulp.
    classical_error_bound_unclamped(delta, k).map(f64::sqrt)
}

/// Quantum sampling failure bound `min(1, 2·exp(−δ²k/6))`.
pub fn quantum_error_bound(delta: f64, k: usize) -> Result<f64, SamplingError> {
    quantum_error_bound_unclamped(delta, k).map(|b| b.min(1.0))
}

/// Slack that makes `gate_factor·M·(ω̂ + δ)` equal the correction capacity `(d−1)/2`.
///
/// A result `<= 0` means the code is already saturated by the estimate.
pub fn delta_for_acceptance(m: usize, omega_hat: f64, d: usize, gate_factor: GateFactor) -> f64 {
    (d as f64 - 1.0) / (2.0 * gate_factor.value() as f64 * m as f64) - omega_hat
}

pub fn estimate_gate_count(m: usize, omega_hat: f64, gate_factor: GateFactor) -> f64 {
    gate_factor.value() as f64 * m as f64 * omega_hat
}

/// Probability that the true relative weight stays below `ω̂ + δ` with δ
/// chosen by [`delta_for_acceptance`]: `1 − ε_qu(δ, k)`.
pub fn success_probability(
    m: usize,
    omega_hat: f64,
    d: usize,
    k: usize,
    gate_factor: GateFactor,
) -> Result<f64, SamplingError> {
    let delta = delta_for_acceptance(m, omega_hat, d, gate_factor);
    if delta.is_nan() || delta <= 0.0 {
        return Err(SamplingError::Saturated(delta));
    }
    Ok(1.0 - quantum_error_bound(delta, k)?)
}

/// Exponent `δ²k/6` used by [`success_probability`].
pub fn success_exponent(m: usize, omega_hat: f64, d: usize, k: usize, gate_factor: GateFactor) -> f64 {
    let delta = delta_for_acceptance(m, omega_hat, d, gate_factor);
    delta * delta * k as f64 / 6.0
}

/// Exponent `k/(12M²)` of the closed form quoted for the M = 25, k = 20000
/// worked example. It is twice [`success_exponent`] at that point.
pub fn printed_example_exponent(m: usize, k: usize) -> f64 {
    k as f64 / (12.0 * (m * m) as f64)
}

/// Diagnostic `1 − 2·exp(−k/(12M²))`, the value quoted for the worked example
/// (86.1% at M = 25, k = 20000). Not consistent with [`success_probability`]
/// and never used for decisions.
pub fn printed_example_success(m: usize, k: usize) -> f64 {
    1.0 - 2.0 * (-printed_example_exponent(m, k)).exp()
}

/// Binomial coefficient, saturating at `u64::MAX`.
pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

/// Exact probability, over a uniformly random k-subset `t` of the positions
/// of `q`, that `|ω(q_rest) − ω(q_t)| ≥ δ`. Enumerates every subset.
pub fn exact_classical_failure(q: &[bool], k: usize, delta: f64) -> Result<Ratio<u64>, SamplingError> {
    let n = q.len();
    if k == 0 || k >= n {
        return Err(SamplingError::BadSubsetSize { n, k });
    }
    let count = binomial(n, k);
    if n > 63 || count > ENUMERATION_GUARD {
        return Err(SamplingError::GuardExceeded { n, k, count });
    }
    let q_mask = q
        .iter()
        .enumerate()
        .fold(0u64, |m, (i, &b)| m | ((b as u64) << i));
    let total_ones = q_mask.count_ones() as usize;

    // Whether a subset fails depends only on how many ones it caught.
    let fails = failing_sample_weights(n, k, total_ones, delta);

    let mut failures = 0u64;
    for_each_subset(n, k, |subset| {
        if fails[(subset & q_mask).count_ones() as usize] {
            failures += 1;
        }
    });
    Ok(Ratio::new(failures, count))
}

fn failing_sample_weights(n: usize, k: usize, total_ones: usize, delta: f64) -> Vec<bool> {
    let delta = BigRational::from_float(delta).unwrap_or_else(|| BigRational::from_integer(BigInt::zero()));
    (0..=k)
        .map(|in_sample| {
            if in_sample > total_ones || total_ones - in_sample > n - k {
                return false;
            }
            let sample = BigRational::new(BigInt::from(in_sample), BigInt::from(k));
            let rest = BigRational::new(BigInt::from(total_ones - in_sample), BigInt::from(n - k));
            let gap = if sample > rest { sample - rest } else { rest - sample };
            gap >= delta
        })
        .collect()
}

/// Visits every n-bit mask with exactly k bits set, in increasing order.
fn for_each_subset(n: usize, k: usize, mut f: impl FnMut(u64)) {
    let mut mask: u64 = (1u64 << k) - 1;
    let limit: u64 = 1u64 << n;
    while mask < limit {
        f(mask);
        let low = mask & mask.wrapping_neg();
        let ripple = mask + low;
        mask = (((ripple ^ mask) >> 2) / low) | ripple;
    }
}

/// Worst case of [`exact_classical_failure`] over all strings of length n.
///
/// Sampling is permutation invariant, so one representative per Hamming
/// weight covers every string. Returns the maximising weight with the value.
pub fn exact_worst_case_failure(n: usize, k: usize, delta: f64) -> Result<(usize, Ratio<u64>), SamplingError> {
    let mut best = (0usize, Ratio::new(0u64, 1));
    for w in 0..=n {
        let q: Vec<bool> = (0..n).map(|i| i < w).collect();
        let p = exact_classical_failure(&q, k, delta)?;
        if p > best.1 {
            best = (w, p);
        }
    }
    Ok(best)
}

pub fn ratio_to_f64(r: Ratio<u64>) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

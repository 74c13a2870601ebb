//! Independent oracles. Nothing here calls into the library's physics.

#![allow(dead_code)]

use num_complex::Complex;
use num_rational::Ratio;

use oneway_epp::pauli::{BasisState, EveAction};

pub type C = Complex<i64>;
pub type Vec2 = [C; 2];
pub type Mat2 = [[C; 2]; 2];

const fn c(re: i64, im: i64) -> C {
    Complex::new(re, im)
}

pub const I2: Mat2 = [[c(1, 0), c(0, 0)], [c(0, 0), c(1, 0)]];
pub const X2: Mat2 = [[c(0, 0), c(1, 0)], [c(1, 0), c(0, 0)]];
pub const Y2: Mat2 = [[c(0, 0), c(0, -1)], [c(0, 1), c(0, 0)]];
pub const Z2: Mat2 = [[c(1, 0), c(0, 0)], [c(0, 0), c(-1, 0)]];
/// |0⟩⟨0|, applied literally as an operator.
pub const P0: Mat2 = [[c(1, 0), c(0, 0)], [c(0, 0), c(0, 0)]];

/// Unnormalised Gaussian-integer kets.
pub fn ket(s: BasisState) -> Vec2 {
    match s {
        BasisState::Z0 => [c(1, 0), c(0, 0)],
        BasisState::Z1 => [c(0, 0), c(1, 0)],
        BasisState::XPlus => [c(1, 0), c(1, 0)],
        BasisState::XMinus => [c(1, 0), c(-1, 0)],
    }
}

pub fn orthogonal(s: BasisState) -> BasisState {
    match s {
        BasisState::Z0 => BasisState::Z1,
        BasisState::Z1 => BasisState::Z0,
        BasisState::XPlus => BasisState::XMinus,
        BasisState::XMinus => BasisState::XPlus,
    }
}

pub fn apply(m: &Mat2, v: &Vec2) -> Vec2 {
    [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
}

pub fn inner(a: &Vec2, b: &Vec2) -> C {
    a[0].conj() * b[0] + a[1].conj() * b[1]
}

pub fn norm_sqr(v: &Vec2) -> i64 {
    inner(v, v).re
}

/// |⟨a|b⟩|² / (‖a‖²‖b‖²) as an exact ratio.
pub fn overlap(a: &Vec2, b: &Vec2) -> Ratio<i64> {
    Ratio::new(inner(a, b).norm_sqr(), norm_sqr(a) * norm_sqr(b))
}

/// Probability that Bob's measurement in the preparation basis of `s`
/// disagrees with `s` after `m` acts as a unitary.
pub fn flip_after_operator(m: &Mat2, s: BasisState) -> Ratio<i64> {
    let out = apply(m, &ket(s));
    let perp = ket(orthogonal(s));
    Ratio::new(inner(&perp, &out).norm_sqr(), norm_sqr(&perp) * norm_sqr(&ket(s)))
}

/// Born rule: Eve measures in the basis of `basis`, the qubit collapses to
/// the outcome, then Bob measures in the preparation basis of `s`.
pub fn flip_after_measurement(basis: [BasisState; 2], s: BasisState) -> Ratio<i64> {
    let psi = ket(s);
    let perp = ket(orthogonal(s));
    basis
        .iter()
        .map(|&b| overlap(&ket(b), &psi) * overlap(&perp, &ket(b)))
        .fold(Ratio::from_integer(0), |a, b| a + b)
}

pub fn oracle_flip(action: EveAction, s: BasisState) -> Ratio<i64> {
    match action {
        EveAction::Identity => flip_after_operator(&I2, s),
        EveAction::PauliX => flip_after_operator(&X2, s),
        EveAction::PauliY => flip_after_operator(&Y2, s),
        EveAction::PauliZ => flip_after_operator(&Z2, s),
        EveAction::MeasZ => flip_after_measurement([BasisState::Z0, BasisState::Z1], s),
        EveAction::MeasX => flip_after_measurement([BasisState::XPlus, BasisState::XMinus], s),
    }
}

/// Mean over the four BB84 states of the literal projector |0⟩⟨0| taken
/// as the operator.
pub fn literal_projector_mean() -> Ratio<i64> {
    BasisState::ALL
        .iter()
        .map(|&s| flip_after_operator(&P0, s))
        .fold(Ratio::from_integer(0), |a, b| a + b)
        / 4
}

pub fn to_signed(r: Ratio<u64>) -> Ratio<i64> {
    Ratio::new(*r.numer() as i64, *r.denom() as i64)
}

/// Distance between two doubles in units in the last place.
pub fn ulp_distance(a: f64, b: f64) -> u64 {
    (a.to_bits() as i64 - b.to_bits() as i64).unsigned_abs()
}

/// Row-reduces `rows` (symplectic vectors packed as (x, z) masks) and
/// reports whether `target` lies in their GF(2) span.
pub fn in_span(rows: &[(u64, u64)], target: (u64, u64), n: usize) -> bool {
    let pack = |(x, z): (u64, u64)| -> u128 { (x as u128) | ((z as u128) << n) };
    let mut basis: Vec<u128> = Vec::new();
    for &r in rows {
        let mut v = pack(r);
        for &b in &basis {
            v = v.min(v ^ b);
        }
        if v != 0 {
            basis.push(v);
            basis.sort_unstable_by(|a, b| b.cmp(a));
        }
    }
    let mut v = pack(target);
    for &b in &basis {
        v = v.min(v ^ b);
    }
    v == 0
}

//! Pauli strings in binary symplectic form and single-qubit detection statistics.
//!
//! A [`PauliString`] stores one X bit and one Z bit per qubit, packed into
//! 64-bit words. Global phase is dropped: syndrome extraction and logical
//! classification never depend on it.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

const WORD: usize = 64;

fn words_for(n: usize) -> usize {
    n.div_ceil(WORD)
}

/// Single-qubit Pauli label.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        };
        write!(f, "{c}")
    }
}

/// n-qubit Pauli operator, phase discarded.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: usize,
    x: Vec<u64>,
    z: Vec<u64>,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        Self {
            n,
            x: vec![0; words_for(n)],
            z: vec![0; words_for(n)],
        }
    }

    /// A single Pauli acting on `qubit`, identity elsewhere.
    pub fn single(n: usize, qubit: usize, p: Pauli) -> Self {
        let mut s = Self::identity(n);
        s.set(qubit, p);
        s
    }

    /// The same Pauli on every listed qubit.
    pub fn on_support(n: usize, qubits: &[usize], p: Pauli) -> Self {
        let mut s = Self::identity(n);
        for &q in qubits {
            s.set(q, p);
        }
        s
    }

    /// Builds a string of up to 64 qubits from packed X and Z masks (bit i = qubit i).
    pub fn from_masks(n: usize, x_mask: u64, z_mask: u64) -> Self {
        assert!(n <= WORD, "mask construction supports at most 64 qubits");
        let keep = if n == WORD { u64::MAX } else { (1u64 << n) - 1 };
        let mut s = Self::identity(n);
        if n > 0 {
            s.x[0] = x_mask & keep;
            s.z[0] = z_mask & keep;
        }
        s
    }

    /// Packed (X, Z) masks for strings of at most 64 qubits.
    pub fn to_masks(&self) -> (u64, u64) {
        assert!(self.n <= WORD, "mask export supports at most 64 qubits");
        (
            self.x.first().copied().unwrap_or(0),
            self.z.first().copied().unwrap_or(0),
        )
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn get(&self, qubit: usize) -> Pauli {
        assert!(qubit < self.n, "qubit {qubit} out of range for {} qubits", self.n);
        let (w, b) = (qubit / WORD, qubit % WORD);
        Pauli::from_bits((self.x[w] >> b) & 1 == 1, (self.z[w] >> b) & 1 == 1)
    }

    pub fn set(&mut self, qubit: usize, p: Pauli) {
        assert!(qubit < self.n, "qubit {qubit} out of range for {} qubits", self.n);
        let (w, b) = (qubit / WORD, qubit % WORD);
        let (xb, zb) = p.bits();
        self.x[w] = (self.x[w] & !(1 << b)) | ((xb as u64) << b);
        self.z[w] = (self.z[w] & !(1 << b)) | ((zb as u64) << b);
    }

    pub fn x_bit(&self, qubit: usize) -> bool {
        matches!(self.get(qubit), Pauli::X | Pauli::Y)
    }

    pub fn z_bit(&self, qubit: usize) -> bool {
        matches!(self.get(qubit), Pauli::Z | Pauli::Y)
    }

    pub fn is_identity(&self) -> bool {
        self.x.iter().chain(&self.z).all(|&w| w == 0)
    }

    /// Number of qubits on which the string acts non-trivially.
    pub fn weight(&self) -> usize {
        self.x
            .iter()
            .zip(&self.z)
            .map(|(x, z)| (x | z).count_ones() as usize)
            .sum()
    }

    /// True iff the symplectic inner product with `other` is even.
    ///
    /// # Panics
    /// If the two strings have different qubit counts.
    pub fn commutes(&self, other: &PauliString) -> bool {
        assert_eq!(self.n, other.n, "commutes: qubit count mismatch");
        let parity = self
            .x
            .iter()
            .zip(&self.z)
            .zip(other.x.iter().zip(&other.z))
            .map(|((px, pz), (qx, qz))| ((px & qz) ^ (pz & qx)).count_ones())
            .sum::<u32>();
        parity % 2 == 0
    }

    /// Product of two strings with the phase dropped (bitwise XOR).
    ///
    /// # Panics
    /// If the two strings have different qubit counts.
    pub fn compose(&self, other: &PauliString) -> PauliString {
        assert_eq!(self.n, other.n, "compose: qubit count mismatch");
        PauliString {
            n: self.n,
            x: self.x.iter().zip(&other.x).map(|(a, b)| a ^ b).collect(),
            z: self.z.iter().zip(&other.z).map(|(a, b)| a ^ b).collect(),
        }
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.n).filter(|&i| self.get(i) != Pauli::I).collect()
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            write!(f, "{}", self.get(i))?;
        }
        Ok(())
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
#[error("invalid Pauli character {0:?}")]
pub struct ParsePauliError(pub char);

impl FromStr for PauliString {
    type Err = ParsePauliError;

    /// Parses strings like `"XIZY"`; qubit 0 is the leftmost character.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let chars: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
        let mut out = PauliString::identity(chars.len());
        for (i, c) in chars.into_iter().enumerate() {
            let p = match c.to_ascii_uppercase() {
                'I' | '_' => Pauli::I,
                'X' => Pauli::X,
                'Y' => Pauli::Y,
                'Z' => Pauli::Z,
                other => return Err(ParsePauliError(other)),
            };
            out.set(i, p);
        }
        Ok(out)
    }
}

/// One of the four BB84 states a sampling qubit is prepared in.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BasisState {
    Z0,
    Z1,
    XPlus,
    XMinus,
}

impl BasisState {
    pub const ALL: [BasisState; 4] = [
        BasisState::Z0,
        BasisState::Z1,
        BasisState::XPlus,
        BasisState::XMinus,
    ];

    pub fn is_z_basis(self) -> bool {
        matches!(self, BasisState::Z0 | BasisState::Z1)
    }
}

/// What Eve does to one qubit in the channel.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EveAction {
    Identity,
    PauliX,
    PauliY,
    PauliZ,
    /// Projective measurement in the computational basis.
    MeasZ,
    /// Projective measurement in the Hadamard basis.
    MeasX,
}

impl EveAction {
    pub const ALL: [EveAction; 6] = [
        EveAction::Identity,
        EveAction::PauliX,
        EveAction::PauliY,
        EveAction::PauliZ,
        EveAction::MeasZ,
        EveAction::MeasX,
    ];

    pub fn is_measurement(self) -> bool {
        matches!(self, EveAction::MeasZ | EveAction::MeasX)
    }

    /// Mean detection probability over the four sampling states, exact.
    pub fn mean_flip_probability(self) -> Ratio<u64> {
        BasisState::ALL
            .iter()
            .map(|&s| flip_probability(self, s).as_ratio())
            .sum::<Ratio<u64>>()
            / 4
    }
}

impl FromStr for EveAction {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "identity" | "i" | "none" => Ok(EveAction::Identity),
            "x" | "pauli_x" => Ok(EveAction::PauliX),
            "y" | "pauli_y" => Ok(EveAction::PauliY),
            "z" | "pauli_z" => Ok(EveAction::PauliZ),
            "meas_z" | "measz" => Ok(EveAction::MeasZ),
            "meas_x" | "measx" => Ok(EveAction::MeasX),
            other => Err(format!("unknown action {other:?}")),
        }
    }
}

/// Detection probability of a single sampling qubit. Only three values occur.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum FlipProbability {
    Zero,
    Half,
    One,
}

impl FlipProbability {
    pub fn as_ratio(self) -> Ratio<u64> {
        match self {
            FlipProbability::Zero => Ratio::new(0, 1),
            FlipProbability::Half => Ratio::new(1, 2),
            FlipProbability::One => Ratio::new(1, 1),
        }
    }
}

/// Probability that Bob, measuring in the preparation basis of `state`,
/// finds the orthogonal state after Eve applies `action`.
///
/// A Pauli either flips the state (anticommutes with the basis observable)
/// or leaves it alone. A measurement in the same basis is non-disturbing;
/// a measurement in the conjugate basis collapses to an eigenstate that
/// then reads out uniformly.
pub fn flip_probability(action: EveAction, state: BasisState) -> FlipProbability {
    use FlipProbability::*;
    let z_basis = state.is_z_basis();
    match action {
        EveAction::Identity => Zero,
        EveAction::PauliY => One,
        EveAction::PauliX => {
            if z_basis {
                One
            } else {
                Zero
            }
        }
        EveAction::PauliZ => {
            if z_basis {
                Zero
            } else {
                One
            }
        }
        EveAction::MeasZ => {
            if z_basis {
                Zero
            } else {
                Half
            }
        }
        EveAction::MeasX => {
            if z_basis {
                Half
            } else {
                Zero
            }
        }
    }
}

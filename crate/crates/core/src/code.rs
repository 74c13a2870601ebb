//! Error-correcting-code layer.
//!
//! Two models sit behind [`CodeSpec`]: the abstract distance rule (any error
//! of weight at most `(d−1)/2` is corrected, anything heavier is a logical
//! failure) and small concrete stabilizer codes whose lookup decoders are
//! built by exhaustive enumeration.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::pauli::PauliString;

/// Concrete codes are capped here because their decoder tables are built by
/// enumerating all 4^n Pauli errors.
pub const MAX_CONCRETE_QUBITS: usize = 10;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum CodeError {
    #[error("unknown code {0:?} (expected repetition3, repetition5, repetition7, repetition9, five13 or surface3)")]
    UnknownCode(String),
    #[error("code distance must be odd and at least 3, got {0}")]
    BadDistance(usize),
    #[error("code has {0} qubits, above the enumeration limit of {MAX_CONCRETE_QUBITS}")]
    TooManyQubits(usize),
    #[error("invalid code definition: {0}")]
    Invalid(String),
    #[error("code acts on {code} qubits but the error acts on {error}")]
    LengthMismatch { code: usize, error: usize },
    #[error("code model needs M = {expected} physical qubits, got {got}")]
    WrongQubitCount { expected: usize, got: usize },
}

/// Named concrete codes.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CodeId {
    /// Bit-flip repetition code with Z⊗Z checks; distance d against X errors.
    RepetitionZ(usize),
    /// The five-qubit perfect code.
    FiveOneThree,
    /// Rotated surface code on a 3×3 patch.
    SurfaceD3,
}

impl CodeId {
    pub fn name(&self) -> String {
        match self {
            CodeId::RepetitionZ(d) => format!("repetition{d}"),
            CodeId::FiveOneThree => "five13".into(),
            CodeId::SurfaceD3 => "surface3".into(),
        }
    }
}

impl fmt::Display for CodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for CodeId {
    type Err = CodeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim().to_ascii_lowercase();
        match s.as_str() {
            "five13" | "five_one_three" => return Ok(CodeId::FiveOneThree),
            "surface3" | "surface_d3" => return Ok(CodeId::SurfaceD3),
            _ => {}
        }
        let digits = s
            .strip_prefix("repetition_z")
            .or_else(|| s.strip_prefix("repetition"))
            .map(|r| r.trim_matches(|c| c == '(' || c == ')'));
        match digits.and_then(|d| d.parse::<usize>().ok()) {
            Some(d) => Ok(CodeId::RepetitionZ(d)),
            None => Err(CodeError::UnknownCode(s)),
        }
    }
}

/// Which single-qubit errors a code is designed against.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum ErrorAlphabet {
    /// X errors only (repetition codes).
    BitFlip,
    /// X, Y and Z.
    Full,
}

/// Class of a zero-syndrome residual.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LogicalEffect {
    Identity,
    LogicalX,
    LogicalY,
    LogicalZ,
}

/// Result of the abstract distance model.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AbstractOutcome {
    CorrectableSuccess,
    UncorrectableFailure,
}

impl AbstractOutcome {
    pub fn for_weight(weight: usize, correctable: usize) -> Self {
        if weight <= correctable {
            AbstractOutcome::CorrectableSuccess
        } else {
            AbstractOutcome::UncorrectableFailure
        }
    }
}

/// Minimum-weight correction per syndrome, indexed by the syndrome bits read
/// as an integer (bit i = stabilizer i).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecoderTable {
    corrections: Vec<Option<PauliString>>,
}

impl DecoderTable {
    pub fn lookup(&self, syndrome: u64) -> Option<&PauliString> {
        self.corrections.get(syndrome as usize).and_then(Option::as_ref)
    }

    pub fn len(&self) -> usize {
        self.corrections.iter().filter(|c| c.is_some()).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_complete(&self) -> bool {
        self.corrections.iter().all(Option::is_some)
    }

    pub fn entries(&self) -> impl Iterator<Item = (u64, &PauliString)> {
        self.corrections
            .iter()
            .enumerate()
            .filter_map(|(s, c)| c.as_ref().map(|c| (s as u64, c)))
    }
}

#[derive(Clone, Debug)]
pub struct StabilizerCodeDef {
    pub id: CodeId,
    pub n: usize,
    pub stabilizers: Vec<PauliString>,
    pub logical_x: PauliString,
    pub logical_z: PauliString,
    pub distance: usize,
    pub alphabet: ErrorAlphabet,
    decoder: DecoderTable,
    group: HashSet<(u64, u64)>,
}

impl StabilizerCodeDef {
    pub fn decoder(&self) -> &DecoderTable {
        &self.decoder
    }

    pub fn correctable(&self) -> usize {
        (self.distance - 1) / 2
    }

    /// Membership in the group generated by the stabilizers, phase ignored.
    pub fn in_stabilizer_group(&self, p: &PauliString) -> bool {
        p.num_qubits() == self.n && self.group.contains(&p.to_masks())
    }

    /// Structured dump of the lookup decoder, one syndrome per line.
    pub fn decoder_table_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "# code {} n={} distance={} stabilizers={}\n",
            self.id,
            self.n,
            self.distance,
            self.stabilizers.len()
        ));
        for (i, s) in self.stabilizers.iter().enumerate() {
            out.push_str(&format!("# S{i} {s}\n"));
        }
        out.push_str(&format!("# logical_x {}\n# logical_z {}\n", self.logical_x, self.logical_z));
        out.push_str("syndrome correction weight support\n");
        let r = self.stabilizers.len();
        for (s, c) in self.decoder.entries() {
            let bits: String = (0..r).map(|i| if (s >> i) & 1 == 1 { '1' } else { '0' }).collect();
            let support = c
                .support()
                .iter()
                .map(|&q| format!("{}{q}", c.get(q)))
                .collect::<Vec<_>>()
                .join(",");
            let support = if support.is_empty() { "-".to_string() } else { support };
            out.push_str(&format!("{bits} {c} {} {support}\n", c.weight()));
        }
        out
    }
}

/// Whether a code model is the abstract distance rule or a concrete code.
#[derive(Clone, Debug)]
pub enum CodeModel {
    AbstractDistance,
    Concrete(Arc<StabilizerCodeDef>),
}

/// The code Alice encodes with.
#[derive(Clone, Debug)]
pub struct CodeSpec {
    pub model: CodeModel,
    pub d: usize,
    pub m: usize,
}

impl CodeSpec {
    pub fn abstract_distance(d: usize, m: usize) -> Result<Self, CodeError> {
        check_distance(d)?;
        Ok(Self {
            model: CodeModel::AbstractDistance,
            d,
            m,
        })
    }

    pub fn concrete(id: CodeId) -> Result<Self, CodeError> {
        let code = build_code(id)?;
        Ok(Self {
            d: code.distance,
            m: code.n,
            model: CodeModel::Concrete(Arc::new(code)),
        })
    }

    /// Number of errors the code corrects.
    pub fn t(&self) -> usize {
        (self.d - 1) / 2
    }

    pub fn name(&self) -> String {
        match &self.model {
            CodeModel::AbstractDistance => "abstract".into(),
            CodeModel::Concrete(c) => c.id.name(),
        }
    }
}

fn check_distance(d: usize) -> Result<(), CodeError> {
    if d < 3 || d.is_multiple_of(2) {
        return Err(CodeError::BadDistance(d));
    }
    Ok(())
}

/// Decision rule: accept iff the estimated gate count fits the correction
/// capacity, `g ≤ (d−1)/2`.
pub fn abstract_accepts(estimated_gates: Ratio<u64>, d: usize) -> bool {
    estimated_gates * 2 <= Ratio::from_integer(d.saturating_sub(1) as u64)
}

fn paulis(n: usize, specs: &[&str]) -> Vec<PauliString> {
    specs
        .iter()
        .map(|s| {
            let p: PauliString = s.parse().expect("built-in code literal");
            assert_eq!(p.num_qubits(), n);
            p
        })
        .collect()
}

/// Builds and validates a named code, including its decoder table.
pub fn build_code(id: CodeId) -> Result<StabilizerCodeDef, CodeError> {
    let (n, stabilizers, logical_x, logical_z, distance, alphabet) = match id {
        CodeId::RepetitionZ(d) => {
            check_distance(d)?;
            if d > MAX_CONCRETE_QUBITS {
                return Err(CodeError::TooManyQubits(d));
            }
            let stabs = (0..d - 1)
                .map(|i| PauliString::on_support(d, &[i, i + 1], crate::pauli::Pauli::Z))
                .collect();
            let lx = PauliString::on_support(d, &(0..d).collect::<Vec<_>>(), crate::pauli::Pauli::X);
            let lz = PauliString::single(d, 0, crate::pauli::Pauli::Z);
            (d, stabs, lx, lz, d, ErrorAlphabet::BitFlip)
        }
        CodeId::FiveOneThree => {
            let s = paulis(5, &["XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"]);
            let l = paulis(5, &["XXXXX", "ZZZZZ"]);
            (5, s, l[0].clone(), l[1].clone(), 3, ErrorAlphabet::Full)
        }
        CodeId::SurfaceD3 => {
            // qubits row-major on a 3×3 grid
            let s = paulis(
                9,
                &[
                    "XXIXXIIII", // bulk X {0,1,3,4}
                    "IIIIXXIXX", // bulk X {4,5,7,8}
                    "IXXIIIIII", // top boundary X {1,2}
                    "IIIIIIXXI", // bottom boundary X {6,7}
                    "IZZIZZIII", // bulk Z {1,2,4,5}
                    "IIIZZIZZI", // bulk Z {3,4,6,7}
                    "ZIIZIIIII", // left boundary Z {0,3}
                    "IIIIIZIIZ", // right boundary Z {5,8}
                ],
            );
            let l = paulis(9, &["XIIXIIXII", "ZZZIIIIII"]);
            (9, s, l[0].clone(), l[1].clone(), 3, ErrorAlphabet::Full)
        }
    };

    let mut code = StabilizerCodeDef {
        id,
        n,
        stabilizers,
        logical_x,
        logical_z,
        distance,
        alphabet,
        decoder: DecoderTable { corrections: Vec::new() },
        group: HashSet::new(),
    };
    validate_structure(&code)?;
    code.group = stabilizer_group(&code.stabilizers);
    verify_distance(&code)?;
    code.decoder = build_decoder_table(&code)?;
    if !code.decoder.is_complete() {
        return Err(CodeError::Invalid("decoder table does not cover every syndrome".into()));
    }
    for (s, c) in code.decoder.entries() {
        if syndrome_mask(&code, c) != s {
            return Err(CodeError::Invalid(format!("table entry {c} does not reproduce syndrome {s:b}")));
        }
    }
    Ok(code)
}

fn validate_structure(code: &StabilizerCodeDef) -> Result<(), CodeError> {
    let n = code.n;
    if n > MAX_CONCRETE_QUBITS {
        return Err(CodeError::TooManyQubits(n));
    }
    if code.stabilizers.len() != n - 1 {
        return Err(CodeError::Invalid(format!(
            "expected {} generators for one logical qubit, got {}",
            n - 1,
            code.stabilizers.len()
        )));
    }
    for (i, a) in code.stabilizers.iter().enumerate() {
        for b in &code.stabilizers[i + 1..] {
            if !a.commutes(b) {
                return Err(CodeError::Invalid(format!("{a} and {b} anticommute")));
            }
        }
        if !a.commutes(&code.logical_x) || !a.commutes(&code.logical_z) {
            return Err(CodeError::Invalid(format!("stabilizer {a} does not commute with the logicals")));
        }
    }
    if code.logical_x.commutes(&code.logical_z) {
        return Err(CodeError::Invalid("logical X and Z commute".into()));
    }
    if gf2_rank(code.stabilizers.iter().map(PauliString::to_masks).collect(), n) != n - 1 {
        return Err(CodeError::Invalid("stabilizer generators are not independent".into()));
    }
    Ok(())
}

fn gf2_rank(rows: Vec<(u64, u64)>, n: usize) -> usize {
    let mut rows: Vec<u64> = rows.into_iter().map(|(x, z)| x | (z << n)).collect();
    let mut rank = 0;
    for bit in 0..2 * n {
        let Some(pivot) = (rank..rows.len()).find(|&r| (rows[r] >> bit) & 1 == 1) else {
            continue;
        };
        rows.swap(rank, pivot);
        for r in 0..rows.len() {
            if r != rank && (rows[r] >> bit) & 1 == 1 {
                rows[r] ^= rows[rank];
            }
        }
        rank += 1;
    }
    rank
}

fn stabilizer_group(gens: &[PauliString]) -> HashSet<(u64, u64)> {
    let masks: Vec<(u64, u64)> = gens.iter().map(PauliString::to_masks).collect();
    (0u64..1 << masks.len())
        .map(|sel| {
            masks
                .iter()
                .enumerate()
                .filter(|(i, _)| (sel >> i) & 1 == 1)
                .fold((0, 0), |(x, z), (_, &(gx, gz))| (x ^ gx, z ^ gz))
        })
        .collect()
}

fn stabilizer_masks(code: &StabilizerCodeDef) -> Vec<(u64, u64)> {
    code.stabilizers.iter().map(PauliString::to_masks).collect()
}

fn syndrome_of_masks(stabs: &[(u64, u64)], x: u64, z: u64) -> u64 {
    stabs.iter().enumerate().fold(0, |acc, (i, &(sx, sz))| {
        let odd = ((x & sz).count_ones() + (z & sx).count_ones()) & 1;
        acc | ((odd as u64) << i)
    })
}

fn syndrome_mask(code: &StabilizerCodeDef, error: &PauliString) -> u64 {
    let (x, z) = error.to_masks();
    syndrome_of_masks(&stabilizer_masks(code), x, z)
}

/// Every error in the code's alphabet of exactly `weight`, as (X, Z) masks,
/// ordered by X mask then Z mask.
fn errors_of_weight(n: usize, alphabet: ErrorAlphabet, weight: usize) -> impl Iterator<Item = (u64, u64)> {
    let z_limit: u64 = match alphabet {
        ErrorAlphabet::BitFlip => 1,
        ErrorAlphabet::Full => 1 << n,
    };
    (0u64..1 << n)
        .flat_map(move |x| (0..z_limit).map(move |z| (x, z)))
        .filter(move |&(x, z)| (x | z).count_ones() as usize == weight)
}

fn verify_distance(code: &StabilizerCodeDef) -> Result<(), CodeError> {
    let stabs = stabilizer_masks(code);
    for w in 1..code.distance {
        for (x, z) in errors_of_weight(code.n, code.alphabet, w) {
            if syndrome_of_masks(&stabs, x, z) == 0 && !code.group.contains(&(x, z)) {
                return Err(CodeError::Invalid(format!(
                    "weight-{w} logical operator {} below claimed distance {}",
                    PauliString::from_masks(code.n, x, z),
                    code.distance
                )));
            }
        }
    }
    Ok(())
}

/// Bit i is 1 iff `error` anticommutes with stabilizer i.
pub fn syndrome(code: &StabilizerCodeDef, error: &PauliString) -> Result<Vec<bool>, CodeError> {
    if error.num_qubits() != code.n {
        return Err(CodeError::LengthMismatch {
            code: code.n,
            error: error.num_qubits(),
        });
    }
    Ok(code.stabilizers.iter().map(|s| !s.commutes(error)).collect())
}

/// Records the first error per syndrome when enumerating the code's error
/// alphabet by ascending weight. Ties go to the smaller X mask, then the
/// smaller Z mask.
pub fn build_decoder_table(code: &StabilizerCodeDef) -> Result<DecoderTable, CodeError> {
    if code.n > MAX_CONCRETE_QUBITS {
        return Err(CodeError::TooManyQubits(code.n));
    }
    let stabs = stabilizer_masks(code);
    let slots = 1usize << stabs.len();
    let mut corrections: Vec<Option<PauliString>> = vec![None; slots];
    let mut filled = 0;
    'weights: for w in 0..=code.n {
        for (x, z) in errors_of_weight(code.n, code.alphabet, w) {
            let s = syndrome_of_masks(&stabs, x, z) as usize;
            if corrections[s].is_none() {
                corrections[s] = Some(PauliString::from_masks(code.n, x, z));
                filled += 1;
                if filled == slots {
                    break 'weights;
                }
            }
        }
    }
    Ok(DecoderTable { corrections })
}

/// Corrects `error` with the lookup decoder and classifies the residual.
///
/// # Panics
/// If `error` has the wrong length, or the syndrome is missing from the table.
pub fn decode_and_classify(code: &StabilizerCodeDef, error: &PauliString) -> LogicalEffect {
    assert_eq!(error.num_qubits(), code.n, "decode: qubit count mismatch");
    let s = syndrome_mask(code, error);
    let correction = code
        .decoder
        .lookup(s)
        .unwrap_or_else(|| panic!("syndrome {s:b} unreachable by the {} decoder", code.id));
    let residual = error.compose(correction);
    debug_assert_eq!(syndrome_mask(code, &residual), 0);
    if code.in_stabilizer_group(&residual) {
        return LogicalEffect::Identity;
    }
    let flips_z = !residual.commutes(&code.logical_z);
    let flips_x = !residual.commutes(&code.logical_x);
    match (flips_z, flips_x) {
        (true, false) => LogicalEffect::LogicalX,
        (false, true) => LogicalEffect::LogicalZ,
        (true, true) => LogicalEffect::LogicalY,
        (false, false) => panic!("residual {residual} commutes with everything but is not a stabilizer"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::Pauli;

    fn p(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn abstract_rule() {
        assert!(abstract_accepts(Ratio::from_integer(2), 5));
        assert!(!abstract_accepts(Ratio::from_integer(3), 5));
        assert!(abstract_accepts(Ratio::from_integer(0), 3));
        assert!(abstract_accepts(Ratio::new(5, 2), 7));
        assert!(!abstract_accepts(Ratio::new(41, 20), 5));
    }

    #[test]
    fn repetition_three() {
        let c = build_code(CodeId::RepetitionZ(3)).unwrap();
        assert_eq!(c.n, 3);
        assert_eq!(c.stabilizers, vec![p("ZZI"), p("IZZ")]);
        assert_eq!(c.distance, 3);
        assert_eq!(syndrome(&c, &p("XII")).unwrap(), vec![true, false]);
        assert_eq!(c.decoder().lookup(0b11), Some(&p("IXI")));
        assert_eq!(c.decoder().lookup(0), Some(&p("III")));
    }

    #[test]
    fn five_qubit_code_is_perfect() {
        let c = build_code(CodeId::FiveOneThree).unwrap();
        assert_eq!((c.n, c.stabilizers.len()), (5, 4));
        let mut seen = HashSet::new();
        for q in 0..5 {
            for a in [Pauli::X, Pauli::Y, Pauli::Z] {
                let s = syndrome_mask(&c, &PauliString::single(5, q, a));
                assert_ne!(s, 0);
                assert!(seen.insert(s));
            }
        }
        assert_eq!(seen.len(), 15);
        for (s, corr) in c.decoder().entries() {
            assert_eq!(corr.weight(), usize::from(s != 0));
        }
    }

    #[test]
    fn surface_code_shape() {
        let c = build_code(CodeId::SurfaceD3).unwrap();
        assert_eq!((c.n, c.stabilizers.len(), c.distance), (9, 8, 3));
        assert!(c.decoder().is_complete());
        assert_eq!(c.decoder().len(), 256);
    }

    #[test]
    fn syndrome_examples() {
        for id in [CodeId::RepetitionZ(3), CodeId::FiveOneThree, CodeId::SurfaceD3] {
            let c = build_code(id).unwrap();
            assert!(syndrome(&c, &PauliString::identity(c.n)).unwrap().iter().all(|&b| !b));
            for s in &c.stabilizers {
                assert!(syndrome(&c, s).unwrap().iter().all(|&b| !b));
                assert_eq!(decode_and_classify(&c, s), LogicalEffect::Identity);
            }
            assert_eq!(decode_and_classify(&c, &c.logical_x), LogicalEffect::LogicalX);
            assert_eq!(decode_and_classify(&c, &c.logical_z), LogicalEffect::LogicalZ);
            assert_eq!(
                decode_and_classify(&c, &c.logical_x.compose(&c.logical_z)),
                LogicalEffect::LogicalY
            );
            assert!(matches!(
                syndrome(&c, &PauliString::identity(c.n + 1)),
                Err(CodeError::LengthMismatch { .. })
            ));
        }
    }

    #[test]
    fn repetition_sees_phase_errors_as_logical() {
        let c = build_code(CodeId::RepetitionZ(3)).unwrap();
        assert_eq!(decode_and_classify(&c, &p("IZI")), LogicalEffect::LogicalZ);
        assert_eq!(decode_and_classify(&c, &p("XXI")), LogicalEffect::LogicalX);
    }

    #[test]
    fn larger_repetition_codes() {
        for d in [5, 7, 9] {
            let c = build_code(CodeId::RepetitionZ(d)).unwrap();
            assert_eq!(c.correctable(), (d - 1) / 2);
            for x in 0u64..1 << d {
                let e = PauliString::from_masks(d, x, 0);
                let expect = if e.weight() <= c.correctable() {
                    LogicalEffect::Identity
                } else {
                    LogicalEffect::LogicalX
                };
                assert_eq!(decode_and_classify(&c, &e), expect, "{e}");
            }
        }
    }

    #[test]
    fn rejects_bad_ids() {
        assert!(matches!("steane".parse::<CodeId>(), Err(CodeError::UnknownCode(_))));
        assert_eq!(build_code(CodeId::RepetitionZ(4)).unwrap_err(), CodeError::BadDistance(4));
        assert_eq!(build_code(CodeId::RepetitionZ(11)).unwrap_err(), CodeError::TooManyQubits(11));
        assert_eq!("repetition3".parse::<CodeId>().unwrap(), CodeId::RepetitionZ(3));
        assert_eq!("repetition_z(5)".parse::<CodeId>().unwrap(), CodeId::RepetitionZ(5));
        assert_eq!("surface3".parse::<CodeId>().unwrap(), CodeId::SurfaceD3);
    }

    #[test]
    fn decoder_table_dump() {
        let c = build_code(CodeId::RepetitionZ(3)).unwrap();
        let text = c.decoder_table_text();
        assert!(text.contains("syndrome correction weight support\n"));
        assert!(text.contains("\n00 III 0 -\n"));
        assert!(text.contains("\n11 IXI 1 X1\n"));
        assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 5);
    }

    #[test]
    fn abstract_spec_validation() {
        assert!(CodeSpec::abstract_distance(5, 25).is_ok());
        assert_eq!(CodeSpec::abstract_distance(4, 25).unwrap_err(), CodeError::BadDistance(4));
        assert_eq!(CodeSpec::abstract_distance(1, 25).unwrap_err(), CodeError::BadDistance(1));
        let s = CodeSpec::concrete(CodeId::SurfaceD3).unwrap();
        assert_eq!((s.d, s.m, s.t()), (3, 9, 1));
    }
}

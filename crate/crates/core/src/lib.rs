//! One-way entanglement purification with quantum sampling.
//!
//! Alice sends an encoded logical qubit together with BB84 sampling qubits
//! under a keyed permutation. Bob measures the sampling qubits, estimates
//! how many gates Eve applied, and either corrects or aborts.
//!
//! - [`pauli`]: symplectic Pauli strings and single-qubit detection statistics
//! - [`sampling`]: sampling error bounds, slack solvers, exact enumeration oracle
//! - [`channel`]: state preparation, attack plans, Pauli-frame transmission
//! - [`code`]: abstract distance rule and small stabilizer codes with lookup decoders
//! - [`protocol`]: Alice and Bob
//! - [`experiments`]: Monte Carlo harness, bound sweeps, reports

pub mod channel;
pub mod code;
pub mod exec;
pub mod experiments;
pub mod pauli;
pub mod protocol;
pub mod sampling;

pub use exec::Execution;

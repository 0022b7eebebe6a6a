//! Parity-encoded QAOA toolkit.
//!
//! All-to-all Ising instances are mapped onto the LHZ parity architecture:
//! one physical qubit per spin pair, the problem encoded in local fields,
//! and uniform plaquette parity constraints. On top of that sit a gate-level
//! circuit IR with a depth-bounded parallel CNOT schedule for the constraint
//! unitaries, a dense statevector simulator, the three quench protocols
//! (problem-Hamiltonian, split, and variational-constraint), and a greedy
//! Monte Carlo harness that optimizes the protocol parameters over random
//! instance ensembles.

pub mod circuit;
pub mod error;
pub mod lhz;
pub mod mc;
pub mod problem;
pub mod protocol;
pub mod report;
pub mod statevector;
pub mod stats;

pub use error::{Error, Result};

//! Simulation engines for random and monitored quantum circuits.
//!
//! * [`circuit`]: circuit IR, gate ensembles, builders and serialization.
//! * [`statevector`]: exact dense simulation for small chains.
//! * [`stabilizer`]: bit-packed tableau simulation of Clifford circuits.
//! * [`classical`]: minimal cuts, membranes, operator-string Markov chains,
//!   U(1) amplitude diffusion and directed polymers.
//! * [`analysis`]: fits and finite-size estimators.

pub mod analysis;
pub mod circuit;
pub mod classical;
pub mod error;
pub mod linalg;
pub mod pauli;
pub mod rng;
pub mod stabilizer;
pub mod statevector;

pub use error::{Error, Result};

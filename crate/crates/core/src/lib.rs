//! Simulator for syndrome-measurement strategies on the [[7,1,3]] code.

pub mod certify;
pub mod code;
pub mod error;
pub mod exec;
pub mod experiment;
pub mod logical;
pub mod noise;
pub mod pauli;
pub mod rng;
pub mod sm;
pub mod state;

pub use error::{Error, Result};
pub use pauli::{Pauli, PauliString, Phase};
pub use state::{Basis, Ensemble, Gate, QuantumState, Role};

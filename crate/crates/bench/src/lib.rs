//! Shared fixtures for the engine benchmarks.

use steane_sm::code::{encode_qubit, qubit_amplitudes};
use steane_sm::QuantumState;

/// A generic encoded data block.
pub fn data_block() -> QuantumState {
    encode_qubit(qubit_amplitudes(0.61, 1.13)).expect("encoding a valid qubit")
}

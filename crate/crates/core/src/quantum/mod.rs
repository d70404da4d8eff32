//! Exact pure-state simulation of few-qubit registers.

mod expand;
mod frame;
mod labels;
mod registry;
mod state;
mod unitary;

pub use expand::{bell_expand, BellExpansion};
pub use frame::{frame_image, pauli_image, solve_partner, solve_pauli, swapped_label, PairSide};
pub use labels::{BellLabel, PauliLabel};
pub use registry::QuantumRegistry;
pub use state::{QubitId, StateVector};
pub use unitary::Unitary2;

use thiserror::Error;

/// Squared-norm tolerance for validated states.
pub const NORM_TOL: f64 = 1e-9;
/// Absolute tolerance for amplitude and fidelity comparisons.
pub const AMPLITUDE_TOL: f64 = 1e-9;
pub const MAX_REGISTER_QUBITS: usize = 16;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuantumError {
    #[error("invalid register: {0}")]
    InvalidRegister(String),
    #[error("unknown qubit {0}")]
    UnknownQubit(QubitId),
    #[error("operator is not unitary")]
    InvalidOperator,
    #[error("registers do not match")]
    RegisterMismatch,
    #[error("state is not normalized (squared norm {0})")]
    NotNormalized(f64),
    #[error("register of {0} qubits exceeds the simulator limit")]
    RegisterTooLarge(usize),
    #[error("unknown label {0:?}")]
    UnknownLabel(String),
}

/// Convenience wrapper matching the free-function form used throughout the
/// protocol code.
pub fn make_bell(label: BellLabel, a: QubitId, b: QubitId) -> Result<StateVector, QuantumError> {
    StateVector::bell(label, a, b)
}

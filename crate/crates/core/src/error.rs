use thiserror::Error;

/// Errors raised by the simulator, the field model and the trainer.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("superluminal trajectory: R*|omega| = {speed} must be < 1")]
    Superluminal { speed: f64 },

    #[error("angle {target} is unreachable; admissible range is (0, {max}]")]
    UnreachableAngle { target: f64, max: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("qubits {0} and {1} occupy the same position")]
    CoincidentPositions(usize, usize),

    #[error("special function overflow at x = {0}")]
    Overflow(f64),

    #[error("quadrature did not converge: estimated relative error {estimate:e} exceeds {tolerance:e}")]
    NonConvergence { estimate: f64, tolerance: f64 },

    #[error("qubit index {index} out of range for {num_qubits} qubits")]
    QubitOutOfRange { index: usize, num_qubits: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid qubit pair ({0}, {1})")]
    InvalidPair(usize, usize),

    #[error("{0} qubits exceed the backend limit of {1}")]
    TooManyQubits(usize, usize),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter { name, reason: reason.into() }
}

//! Gates and channels acting on `N`-qubit states.
//!
//! Conventions: qubit `i` is bit `i` of a basis index (least significant bit
//! first) and carries spin `μ_i = +1` for bit value 0. The entangler is the
//! diagonal `U_C = exp(-(iλ²/2) Σ_{i<j} Δ_ij Z_i Z_j)`; the field noise is a
//! dephasing channel diagonal in the same basis, so the two commute.

mod channel;
mod circuit;
mod gates;
mod state;

pub use channel::{apply_channel, apply_dephasing, exact_channel_fidelity, DephasingKernel};
pub use circuit::{apply_circuit, circuit_unitary, CircuitParams, LayerParams, Rotation};
pub use gates::{
    apply_1q, apply_entangler, apply_rotation, axis, entangler_phases, ising_energies, pauli_dot, rotation_matrix,
    spin, DiagonalTarget, PAULI_X,
};
pub use state::{state_fidelity, DensityMatrix, StateVector, MAX_DENSITY_QUBITS, MAX_STATE_QUBITS};

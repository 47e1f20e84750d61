//! Simulation and training of relativistic variational quantum circuits.
//!
//! Single-qubit rotation angles come from the proper time of qubits moving
//! on circular worldlines ([`spacetime`]); entanglement comes from a shared
//! scalar field whose smeared propagators fix a global diagonal entangling
//! unitary and a dephasing channel ([`field`], [`sim`]). [`transpile`]
//! isolates a single-pair gate from repeated global entanglers, and
//! [`train`] fits the layered circuit to a target unitary.
// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Quadrature nodes and reference values are quoted at their published precision.
#![allow(clippy::excessive_precision)]

pub mod error;
pub mod field;
pub mod linalg;
pub mod quadrature;
pub mod sim;
pub mod spacetime;
pub mod special;
pub mod train;
pub mod transpile;

pub use error::{Error, Result};

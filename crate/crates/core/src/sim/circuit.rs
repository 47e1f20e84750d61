use super::gates::{apply_1q, entangler_phases, rotation_matrix};
use super::state::{check_size, StateVector, MAX_STATE_QUBITS};
use crate::error::{invalid, Error, Result};
use crate::field::CouplingMatrix;
use crate::linalg::CMatrix;

/// Rotation `e^{-iθ n(ϑ,φ)·σ}` on one qubit.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Rotation {
    pub theta: f64,
    pub vartheta: f64,
    pub varphi: f64,
}

impl Rotation {
    pub fn new(theta: f64, vartheta: f64, varphi: f64) -> Self {
        Self { theta, vartheta, varphi }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.theta, self.vartheta, self.varphi]
    }
}

/// Parallel single-qubit rotations forming one layer; entry `i` acts on qubit `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerParams {
    pub rotations: Vec<Rotation>,
}

impl LayerParams {
    pub fn new(rotations: Vec<Rotation>) -> Result<Self> {
        if rotations.iter().flat_map(|r| r.as_array()).any(|x| !x.is_finite()) {
            return Err(invalid("rotations", "angles must be finite"));
        }
        Ok(Self { rotations })
    }

    pub fn identity(num_qubits: usize) -> Self {
        Self { rotations: vec![Rotation::default(); num_qubits] }
    }

    pub fn num_qubits(&self) -> usize {
        self.rotations.len()
    }
}

/// Parameters of `D` layers; layer 0 acts first.
#[derive(Debug, Clone, PartialEq)]
pub struct CircuitParams {
    layers: Vec<LayerParams>,
}

impl CircuitParams {
    pub fn new(layers: Vec<LayerParams>) -> Result<Self> {
        let Some(first) = layers.first() else {
            return Err(invalid("layers", "depth must be ≥ 1"));
        };
        let n = first.num_qubits();
        for l in &layers {
            if l.num_qubits() != n {
                return Err(Error::DimensionMismatch { expected: n, found: l.num_qubits() });
            }
            LayerParams::new(l.rotations.clone())?;
        }
        Ok(Self { layers })
    }

    /// Number of trainable scalars, `3 N D`.
    pub fn len(&self) -> usize {
        3 * self.num_qubits() * self.depth()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn num_qubits(&self) -> usize {
        self.layers[0].num_qubits()
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn layers(&self) -> &[LayerParams] {
        &self.layers
    }

    /// Flattened as `[layer][qubit][θ, ϑ, φ]`.
    pub fn to_flat(&self) -> Vec<f64> {
        self.layers.iter().flat_map(|l| l.rotations.iter().flat_map(|r| r.as_array())).collect()
    }

    pub fn from_flat(num_qubits: usize, depth: usize, flat: &[f64]) -> Result<Self> {
        if flat.len() != 3 * num_qubits * depth {
            return Err(Error::DimensionMismatch { expected: 3 * num_qubits * depth, found: flat.len() });
        }
        let layers = flat
            .chunks(3 * num_qubits.max(1))
            .take(depth)
            .map(|c| LayerParams::new(c.chunks(3).map(|r| Rotation::new(r[0], r[1], r[2])).collect()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(layers)
    }

    /// CSV with columns `layer,qubit,theta,vartheta,varphi`.
    pub fn to_csv(&self) -> String {
        use crate::linalg::fmt_f64;
        let mut out = String::from("layer,qubit,theta,vartheta,varphi\n");
        for (l, layer) in self.layers.iter().enumerate() {
            for (q, r) in layer.rotations.iter().enumerate() {
                out.push_str(&format!("{l},{q},{},{},{}\n", fmt_f64(r.theta), fmt_f64(r.vartheta), fmt_f64(r.varphi)));
            }
        }
        out
    }
}

fn check_coupling(params: &CircuitParams, coupling: &CouplingMatrix) -> Result<()> {
    if params.num_qubits() != coupling.num_qubits() {
        return Err(Error::DimensionMismatch { expected: coupling.num_qubits(), found: params.num_qubits() });
    }
    check_size(params.num_qubits(), MAX_STATE_QUBITS)
}

/// `U_𝜽 = Π_ℓ U_C U_para(𝜽^(ℓ))`, with layer 0 applied first.
pub fn circuit_unitary(params: &CircuitParams, coupling: &CouplingMatrix, lambda: f64) -> Result<CMatrix> {
    check_coupling(params, coupling)?;
    let phases = entangler_phases(coupling, lambda);
    let mut u = CMatrix::identity(phases.len());
    for layer in params.layers() {
        for (q, r) in layer.rotations.iter().enumerate() {
            u.apply_left_1q(q, &rotation_matrix(r.theta, r.vartheta, r.varphi));
        }
        u.scale_rows(&phases);
    }
    Ok(u)
}

/// `U_𝜽|ψ⟩` without forming the matrix.
pub fn apply_circuit(
    state: &mut StateVector,
    params: &CircuitParams,
    coupling: &CouplingMatrix,
    lambda: f64,
) -> Result<()> {
    check_coupling(params, coupling)?;
    if state.num_qubits() != params.num_qubits() {
        return Err(Error::DimensionMismatch { expected: params.num_qubits(), found: state.num_qubits() });
    }
    let phases = entangler_phases(coupling, lambda);
    for layer in params.layers() {
        for (q, r) in layer.rotations.iter().enumerate() {
            apply_1q(state, q, &rotation_matrix(r.theta, r.vartheta, r.varphi))?;
        }
        for (a, p) in state.amplitudes_mut().iter_mut().zip(&phases) {
            *a *= p;
        }
    }
    Ok(())
}

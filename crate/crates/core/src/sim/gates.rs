use super::state::{DensityMatrix, StateVector};
use crate::error::{Error, Result};
use crate::field::CouplingMatrix;
use crate::linalg::{Mat2, C64, I, ONE};

/// Unit vector `n(ϑ, φ) = (sin ϑ cos φ, sin ϑ sin φ, cos ϑ)`.
pub fn axis(vartheta: f64, varphi: f64) -> [f64; 3] {
    let (st, ct) = vartheta.sin_cos();
    let (sp, cp) = varphi.sin_cos();
    [st * cp, st * sp, ct]
}

/// `n·σ` for a (not necessarily unit) vector `n`.
pub fn pauli_dot(n: [f64; 3]) -> Mat2 {
    [[C64::new(n[2], 0.0), C64::new(n[0], -n[1])], [C64::new(n[0], n[1]), C64::new(-n[2], 0.0)]]
}

/// `e^{-iθ n(ϑ,φ)·σ} = cos θ I - i sin θ n·σ`.
pub fn rotation_matrix(theta: f64, vartheta: f64, varphi: f64) -> Mat2 {
    let (s, c) = theta.sin_cos();
    let g = pauli_dot(axis(vartheta, varphi));
    let mut m = [[C64::new(0.0, 0.0); 2]; 2];
    for r in 0..2 {
        for k in 0..2 {
            let id = if r == k { c } else { 0.0 };
            m[r][k] = C64::new(id, 0.0) - I * s * g[r][k];
        }
    }
    m
}

/// Applies a 2×2 operator to qubit `q` of a state vector.
pub fn apply_1q(state: &mut StateVector, q: usize, op: &Mat2) -> Result<()> {
    let n = state.num_qubits();
    if q >= n {
        return Err(Error::QubitOutOfRange { index: q, num_qubits: n });
    }
    let bit = 1usize << q;
    let amps = state.amplitudes_mut();
    for b0 in 0..amps.len() {
        if b0 & bit != 0 {
            continue;
        }
        let b1 = b0 | bit;
        let (x0, x1) = (amps[b0], amps[b1]);
        amps[b0] = op[0][0] * x0 + op[0][1] * x1;
        amps[b1] = op[1][0] * x0 + op[1][1] * x1;
    }
    Ok(())
}

pub fn apply_rotation(state: &mut StateVector, qubit: usize, theta: f64, vartheta: f64, varphi: f64) -> Result<()> {
    apply_1q(state, qubit, &rotation_matrix(theta, vartheta, varphi))
}

/// Z eigenvalue of qubit `i` in basis state `b`: `+1` for bit 0, `-1` for bit 1.
#[inline]
pub fn spin(b: usize, i: usize) -> f64 {
    if (b >> i) & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `Σ_{i<j} Δ_ij μ_i(b) μ_j(b)` for every basis index `b`.
pub fn ising_energies(coupling: &CouplingMatrix) -> Vec<f64> {
    let n = coupling.num_qubits();
    (0..1usize << n)
        .map(|b| {
            let mut e = 0.0;
            for i in 0..n {
                for j in i + 1..n {
                    e += coupling.delta(i, j) * spin(b, i) * spin(b, j);
                }
            }
            e
        })
        .collect()
}

/// Diagonal of `U_C = exp(-(iλ²/2) Σ_{i<j} Δ_ij Z_i Z_j)`.
pub fn entangler_phases(coupling: &CouplingMatrix, lambda: f64) -> Vec<C64> {
    let k = -0.5 * lambda * lambda;
    ising_energies(coupling).into_iter().map(|e| C64::from_polar(1.0, k * e)).collect()
}

/// Anything a diagonal unitary can act on.
pub trait DiagonalTarget {
    fn dim(&self) -> usize;
    /// Applies `diag(phases)` (conjugating for mixed states).
    fn apply_diagonal(&mut self, phases: &[C64]) -> Result<()>;
}

impl DiagonalTarget for StateVector {
    fn dim(&self) -> usize {
        StateVector::dim(self)
    }

    fn apply_diagonal(&mut self, phases: &[C64]) -> Result<()> {
        if phases.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: phases.len() });
        }
        for (a, p) in self.amplitudes_mut().iter_mut().zip(phases) {
            *a *= p;
        }
        Ok(())
    }
}

impl DiagonalTarget for DensityMatrix {
    fn dim(&self) -> usize {
        DensityMatrix::dim(self)
    }

    fn apply_diagonal(&mut self, phases: &[C64]) -> Result<()> {
        if phases.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: phases.len() });
        }
        let conj: Vec<C64> = phases.iter().map(|p| p.conj()).collect();
        let m = self.entries_mut();
        m.scale_rows(phases);
        m.scale_cols(&conj);
        Ok(())
    }
}

/// Applies `U_C` to a state vector or density matrix.
pub fn apply_entangler<S: DiagonalTarget>(target: &mut S, coupling: &CouplingMatrix, lambda: f64) -> Result<()> {
    let expected = 1usize << coupling.num_qubits();
    if target.dim() != expected {
        return Err(Error::DimensionMismatch { expected, found: target.dim() });
    }
    target.apply_diagonal(&entangler_phases(coupling, lambda))
}

/// Pauli X as a 2×2 matrix.
pub const PAULI_X: Mat2 = [[C64::new(0.0, 0.0), ONE], [ONE, C64::new(0.0, 0.0)]];

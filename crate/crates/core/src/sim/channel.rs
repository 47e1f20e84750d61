use super::gates::{apply_entangler, spin};
use super::state::{check_size, DensityMatrix, StateVector, MAX_DENSITY_QUBITS};
use crate::error::{Error, Result};
use crate::field::CouplingMatrix;

/// Element-wise decay factors of the dephasing channel for one coupling,
/// `f(μ, μ') = exp(-(λ²/2) Σ_ij (μ_i - μ'_i)(μ_j - μ'_j) W_ij)`, stored as a
/// `2^N × 2^N` row-major table.
///
/// Building the table costs `O(4^N N²)`; reuse it when many states share one
/// coupling.
#[derive(Debug, Clone, PartialEq)]
pub struct DephasingKernel {
    num_qubits: usize,
    factors: Vec<f64>,
    /// `1 - f`, kept separately so small infidelities keep full precision.
    defects: Vec<f64>,
}

impl DephasingKernel {
    pub fn new(coupling: &CouplingMatrix, lambda: f64) -> Result<Self> {
        let n = coupling.num_qubits();
        check_size(n, MAX_DENSITY_QUBITS)?;
        let dim = 1usize << n;
        let w = coupling.wightman_matrix();
        let k = 0.5 * lambda * lambda;
        let mut factors = vec![1.0; dim * dim];
        let mut defects = vec![0.0; dim * dim];
        let mut flipped = Vec::with_capacity(n);
        for b in 0..dim {
            for b2 in 0..dim {
                let x = b ^ b2;
                if x == 0 {
                    continue;
                }
                // μ_i - μ'_i = 2μ_i on flipped qubits, 0 elsewhere
                flipped.clear();
                flipped.extend((0..n).filter(|i| (x >> i) & 1 == 1).map(|i| (i, 2.0 * spin(b, i))));
                let mut quad = 0.0;
                for &(i, di) in &flipped {
                    for &(j, dj) in &flipped {
                        quad += di * dj * w[i * n + j];
                    }
                }
                factors[b * dim + b2] = (-k * quad).exp();
                defects[b * dim + b2] = -(-k * quad).exp_m1();
            }
        }
        Ok(Self { num_qubits: n, factors, defects })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn factor(&self, b: usize, b2: usize) -> f64 {
        self.factors[(b << self.num_qubits) + b2]
    }

    /// `ρ_{μμ'} ← f(μ, μ') ρ_{μμ'}`.
    pub fn apply(&self, rho: &mut DensityMatrix) -> Result<()> {
        if rho.num_qubits() != self.num_qubits {
            return Err(Error::DimensionMismatch { expected: 1 << self.num_qubits, found: rho.dim() });
        }
        for (x, f) in rho.entries_mut().as_mut_slice().iter_mut().zip(&self.factors) {
            *x *= f;
        }
        Ok(())
    }

    /// `Σ_{μ,μ'} f(μ, μ') |⟨μ|ψ⟩|² |⟨μ'|ψ⟩|²`, evaluated as
    /// `1 - Σ (1 - f) p_μ p_μ'` with `p` renormalized, so it is exactly 1
    /// without coupling and never exceeds 1.
    pub fn fidelity(&self, psi: &StateVector) -> Result<f64> {
        if psi.num_qubits() != self.num_qubits {
            return Err(Error::DimensionMismatch { expected: 1 << self.num_qubits, found: psi.dim() });
        }
        let norm = psi.norm_sqr();
        let p: Vec<f64> = psi.amplitudes().iter().map(|a| a.norm_sqr() / norm).collect();
        let dim = p.len();
        let mut loss = 0.0;
        for (b, pb) in p.iter().enumerate() {
            let row = &self.defects[b * dim..(b + 1) * dim];
            let inner: f64 = row.iter().zip(&p).map(|(d, q)| d * q).sum();
            loss += pb * inner;
        }
        Ok(1.0 - loss)
    }
}

/// Applies the field-induced dephasing `E_φ` to `rho`.
pub fn apply_dephasing(rho: &mut DensityMatrix, coupling: &CouplingMatrix, lambda: f64) -> Result<()> {
    DephasingKernel::new(coupling, lambda)?.apply(rho)
}

/// Full layer channel `ρ ↦ U_C E_φ(ρ) U_C†`.
pub fn apply_channel(rho: &mut DensityMatrix, coupling: &CouplingMatrix, lambda: f64) -> Result<()> {
    apply_dephasing(rho, coupling, lambda)?;
    apply_entangler(rho, coupling, lambda)
}

/// `⟨ψ| E_φ(|ψ⟩⟨ψ|) |ψ⟩`, the overlap of the noisy output with the ideal one
/// (the entangler drops out because it commutes with the dephasing).
pub fn exact_channel_fidelity(psi: &StateVector, coupling: &CouplingMatrix, lambda: f64) -> Result<f64> {
    DephasingKernel::new(coupling, lambda)?.fidelity(psi)
}

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{invalid, Error, Result};
use crate::linalg::{fmt_f64, CMatrix, C64, ONE, ZERO};

/// Largest register the statevector backend accepts.
pub const MAX_STATE_QUBITS: usize = 20;
/// Largest register the density-matrix backend accepts.
pub const MAX_DENSITY_QUBITS: usize = 10;

const NORM_TOL: f64 = 1e-10;

/// Pure state of `N` qubits; amplitude `b` belongs to basis state `|b⟩` with
/// qubit `i` stored in bit `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amplitudes: Vec<C64>,
}

impl StateVector {
    /// Wraps amplitudes that are already normalized (within 1e-10).
    pub fn new(num_qubits: usize, amplitudes: Vec<C64>) -> Result<Self> {
        check_size(num_qubits, MAX_STATE_QUBITS)?;
        if amplitudes.len() != 1 << num_qubits {
            return Err(Error::DimensionMismatch { expected: 1 << num_qubits, found: amplitudes.len() });
        }
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(invalid("amplitudes", format!("squared norm is {norm}, expected 1")));
        }
        Ok(Self { num_qubits, amplitudes })
    }

    /// Normalizes arbitrary nonzero amplitudes.
    pub fn from_unnormalized(num_qubits: usize, mut amplitudes: Vec<C64>) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(invalid("amplitudes", "cannot normalize a zero or non-finite vector"));
        }
        for a in &mut amplitudes {
            *a /= norm;
        }
        Self::new(num_qubits, amplitudes)
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(num_qubits: usize, index: usize) -> Result<Self> {
        check_size(num_qubits, MAX_STATE_QUBITS)?;
        let dim = 1usize << num_qubits;
        if index >= dim {
            return Err(invalid("index", format!("{index} is not a basis index for {num_qubits} qubits")));
        }
        let mut amplitudes = vec![ZERO; dim];
        amplitudes[index] = ONE;
        Ok(Self { num_qubits, amplitudes })
    }

    /// `|+⟩^{⊗N}`.
    pub fn plus(num_qubits: usize) -> Result<Self> {
        check_size(num_qubits, MAX_STATE_QUBITS)?;
        let dim = 1usize << num_qubits;
        let a = C64::new(1.0 / (dim as f64).sqrt(), 0.0);
        Ok(Self { num_qubits, amplitudes: vec![a; dim] })
    }

    /// I.i.d. complex standard normal amplitudes (real and imaginary parts
    /// each `N(0, 1)`), then normalized.
    pub fn random(num_qubits: usize, rng: &mut impl Rng) -> Result<Self> {
        check_size(num_qubits, MAX_STATE_QUBITS)?;
        let amplitudes = (0..1usize << num_qubits)
            .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        Self::from_unnormalized(num_qubits, amplitudes)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [C64] {
        &mut self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Result<C64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        Ok(self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum())
    }

    /// `U|ψ⟩` for a `2^N × 2^N` matrix.
    pub fn apply_matrix(&self, u: &CMatrix) -> Result<Self> {
        if u.rows() != self.dim() || u.cols() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: u.rows() });
        }
        Ok(Self { num_qubits: self.num_qubits, amplitudes: u.matvec(&self.amplitudes) })
    }

    pub fn to_density_matrix(&self) -> Result<DensityMatrix> {
        check_size(self.num_qubits, MAX_DENSITY_QUBITS)?;
        let dim = self.dim();
        let a = &self.amplitudes;
        let entries = CMatrix::from_fn(dim, dim, |r, c| a[r] * a[c].conj());
        Ok(DensityMatrix { num_qubits: self.num_qubits, entries })
    }

    /// Reduced state of the listed qubits (in the given order, first listed
    /// qubit becomes bit 0).
    pub fn reduced_density_matrix(&self, keep: &[usize]) -> Result<CMatrix> {
        for (k, &q) in keep.iter().enumerate() {
            if q >= self.num_qubits {
                return Err(Error::QubitOutOfRange { index: q, num_qubits: self.num_qubits });
            }
            if keep[..k].contains(&q) {
                return Err(invalid("keep", format!("qubit {q} listed twice")));
            }
        }
        let sub = 1usize << keep.len();
        let local = |b: usize| keep.iter().enumerate().fold(0, |acc, (k, &q)| acc | (((b >> q) & 1) << k));
        let keep_mask: usize = keep.iter().map(|q| 1usize << q).sum();
        let scatter = |l: usize| keep.iter().enumerate().fold(0, |acc, (k, &q)| acc | (((l >> k) & 1) << q));
        let mut rho = CMatrix::zeros(sub, sub);
        for b in 0..self.dim() {
            let outer = b & !keep_mask;
            for l2 in 0..sub {
                let b2 = outer | scatter(l2);
                rho[(local(b), l2)] += self.amplitudes[b] * self.amplitudes[b2].conj();
            }
        }
        Ok(rho)
    }

    /// Von Neumann entropy (in bits) of the reduced state of `keep`.
    pub fn entanglement_entropy(&self, keep: &[usize]) -> Result<f64> {
        let rho = self.reduced_density_matrix(keep)?;
        Ok(rho.hermitian_eigenvalues().into_iter().filter(|&p| p > 1e-15).map(|p| -p * p.log2()).sum())
    }

    /// One line per amplitude: `index,re,im`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,re,im\n");
        for (b, a) in self.amplitudes.iter().enumerate() {
            out.push_str(&format!("{b},{},{}\n", fmt_f64(a.re), fmt_f64(a.im)));
        }
        out
    }
}

/// Mixed state of `N ≤ 10` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    num_qubits: usize,
    entries: CMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity (all within 1e-10).
    pub fn new(num_qubits: usize, entries: CMatrix) -> Result<Self> {
        check_size(num_qubits, MAX_DENSITY_QUBITS)?;
        let dim = 1usize << num_qubits;
        if entries.rows() != dim || entries.cols() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: entries.rows() });
        }
        let rho = Self { num_qubits, entries };
        if rho.entries.hermiticity_residual() > NORM_TOL {
            return Err(invalid("rho", "not Hermitian"));
        }
        if (rho.trace() - 1.0).abs() > NORM_TOL {
            return Err(invalid("rho", format!("trace is {}", rho.trace())));
        }
        if rho.min_eigenvalue() < -NORM_TOL {
            return Err(invalid("rho", "not positive semidefinite"));
        }
        Ok(rho)
    }

    pub fn from_pure(psi: &StateVector) -> Result<Self> {
        psi.to_density_matrix()
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.entries.rows()
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub(crate) fn entries_mut(&mut self) -> &mut CMatrix {
        &mut self.entries
    }

    pub fn trace(&self) -> f64 {
        self.entries.trace().re
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.entries.hermitian_eigenvalues().first().copied().unwrap_or(0.0)
    }

    /// `U ρ U†`.
    pub fn conjugate_by(&self, u: &CMatrix) -> Result<Self> {
        if u.rows() != self.dim() || u.cols() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: u.rows() });
        }
        Ok(Self { num_qubits: self.num_qubits, entries: u.matmul(&self.entries).matmul(&u.adjoint()) })
    }

    /// `⟨ψ|ρ|ψ⟩`.
    pub fn expectation_pure(&self, psi: &StateVector) -> Result<f64> {
        if psi.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: psi.dim() });
        }
        let a = psi.amplitudes();
        let mut acc = ZERO;
        for (r, ar) in a.iter().enumerate() {
            let row = self.entries.row(r);
            let inner: C64 = row.iter().zip(a).map(|(x, y)| x * y).sum();
            acc += ar.conj() * inner;
        }
        Ok(acc.re)
    }

    pub fn to_csv(&self) -> String {
        self.entries.to_csv()
    }
}

pub(crate) fn check_size(num_qubits: usize, limit: usize) -> Result<()> {
    if num_qubits > limit {
        return Err(Error::TooManyQubits(num_qubits, limit));
    }
    Ok(())
}

/// `|⟨a|b⟩|²`.
pub fn state_fidelity(a: &StateVector, b: &StateVector) -> Result<f64> {
    Ok(a.inner(b)?.norm_sqr().min(1.0))
}

//! Field-mediated couplings for Gaussian-smeared qubits in the Minkowski vacuum
//! of a massless scalar field.
//!
//! Each qubit couples through `Λ_i(t, x) = e^{-(t-t_c)²/2T²} g_σ(x - x_i)` with
//! `g_σ` a normalized 3D Gaussian. Integrating over all time, the symmetric
//! retarded propagator `Δ_ij`, the smeared Wightman function `W_ij` and the
//! commutator term (identically zero here) have closed forms in `T`, `σ` and
//! the separation `L_ij`.

mod oracle;

use std::f64::consts::PI;

use crate::error::{invalid, Error, Result};
use crate::linalg::fmt_f64;
use crate::special::{dawson, erf};

pub use oracle::{quadrature_oracle_delta, quadrature_oracle_wightman, OracleValue, ORACLE_TOLERANCE};

/// Shape and strength of the qubit–field interaction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InteractionProfile {
    /// Gaussian time width `T`.
    pub duration: f64,
    /// Spatial smearing width `σ`.
    pub sigma: f64,
    /// Coupling constant `λ`.
    pub lambda: f64,
    /// Centre of the interaction window `t_c`. It drops out of every closed form.
    pub t_center: f64,
}

impl InteractionProfile {
    pub fn new(duration: f64, sigma: f64, lambda: f64) -> Result<Self> {
        let p = Self { duration, sigma, lambda, t_center: 7.0 * duration };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.duration > 0.0) || !self.duration.is_finite() {
            return Err(invalid("duration", format!("T must be finite and > 0, got {}", self.duration)));
        }
        if !(self.sigma > 0.0) || !self.sigma.is_finite() {
            return Err(invalid("sigma", format!("must be finite and > 0, got {}", self.sigma)));
        }
        if !(self.lambda >= 0.0) || !self.lambda.is_finite() {
            return Err(invalid("lambda", format!("must be finite and ≥ 0, got {}", self.lambda)));
        }
        Ok(())
    }

    /// Window `[t_c - 7T, t_c + 7T]` used when scheduling layers. The closed
    /// forms integrate over all time; the tails outside carry less than 1e-9.
    pub fn interaction_window(&self) -> (f64, f64) {
        (self.t_center - 7.0 * self.duration, self.t_center + 7.0 * self.duration)
    }
}

/// Spatial positions of the qubits while they interact with the field.
#[derive(Debug, Clone, PartialEq)]
pub struct QubitLayout {
    positions: Vec<[f64; 3]>,
}

impl QubitLayout {
    pub fn new(positions: Vec<[f64; 3]>) -> Result<Self> {
        let layout = Self { positions };
        for i in 0..layout.len() {
            if layout.positions[i].iter().any(|c| !c.is_finite()) {
                return Err(invalid("positions", format!("qubit {i} has a non-finite coordinate")));
            }
            for j in i + 1..layout.len() {
                if layout.separation(i, j) == 0.0 {
                    return Err(Error::CoincidentPositions(i, j));
                }
            }
        }
        Ok(layout)
    }

    /// `nx × ny` rectangular lattice in the z = 0 plane; qubit `iy·nx + ix`
    /// sits at `(ix·dx, iy·dy, 0)`.
    pub fn rectangular_lattice(nx: usize, ny: usize, dx: f64, dy: f64) -> Result<Self> {
        let mut positions = Vec::with_capacity(nx * ny);
        for iy in 0..ny {
            for ix in 0..nx {
                positions.push([ix as f64 * dx, iy as f64 * dy, 0.0]);
            }
        }
        Self::new(positions)
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn positions(&self) -> &[[f64; 3]] {
        &self.positions
    }

    pub fn separation(&self, i: usize, j: usize) -> f64 {
        let (a, b) = (self.positions[i], self.positions[j]);
        ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
    }

    /// Layout with qubits relabelled so that new qubit `k` is old qubit `perm[k]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        Self::new(perm.iter().map(|&k| self.positions[k]).collect())
    }
}

/// Symmetric coupling data for one entangling layer.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingMatrix {
    n: usize,
    delta: Vec<f64>,
    wightman: Vec<f64>,
    noise_scale: f64,
}

impl CouplingMatrix {
    /// Builds a coupling from explicit matrices (row-major, `n × n`).
    ///
    /// `delta` must be symmetric with zero diagonal, `wightman` symmetric.
    /// The noise scale is `max_ij |W_ij|`.
    pub fn from_matrices(n: usize, delta: Vec<f64>, wightman: Vec<f64>) -> Result<Self> {
        if delta.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, found: delta.len() });
        }
        if wightman.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, found: wightman.len() });
        }
        for i in 0..n {
            if delta[i * n + i] != 0.0 {
                return Err(invalid("delta", format!("diagonal entry {i} must be zero")));
            }
            for j in 0..n {
                if delta[i * n + j] != delta[j * n + i] || wightman[i * n + j] != wightman[j * n + i] {
                    return Err(invalid("delta/wightman", format!("entries ({i},{j}) are not symmetric")));
                }
            }
        }
        let noise_scale = wightman.iter().map(|w| w.abs()).fold(0.0, f64::max);
        Ok(Self { n, delta, wightman, noise_scale })
    }

    /// Coupling with the given `Δ` and a vanishing Wightman matrix (no dephasing).
    pub fn noiseless(n: usize, delta: Vec<f64>) -> Result<Self> {
        Self::from_matrices(n, delta, vec![0.0; n * n])
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn delta(&self, i: usize, j: usize) -> f64 {
        self.delta[i * self.n + j]
    }

    pub fn wightman(&self, i: usize, j: usize) -> f64 {
        self.wightman[i * self.n + j]
    }

    pub fn delta_matrix(&self) -> &[f64] {
        &self.delta
    }

    pub fn wightman_matrix(&self) -> &[f64] {
        &self.wightman
    }

    /// `𝒲 = max_ij |W_ij|`.
    pub fn noise_scale(&self) -> f64 {
        self.noise_scale
    }

    /// Same coupling with `Δ` multiplied by `factor` (W unchanged).
    pub fn scale_delta(&self, factor: f64) -> Self {
        Self {
            n: self.n,
            delta: self.delta.iter().map(|d| d * factor).collect(),
            wightman: self.wightman.clone(),
            noise_scale: self.noise_scale,
        }
    }

    /// Relabels qubits: new qubit `k` is old qubit `perm[k]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let n = self.n;
        let mut delta = vec![0.0; n * n];
        let mut wightman = vec![0.0; n * n];
        for a in 0..n {
            for b in 0..n {
                delta[a * n + b] = self.delta(perm[a], perm[b]);
                wightman[a * n + b] = self.wightman(perm[a], perm[b]);
            }
        }
        Self { n, delta, wightman, noise_scale: self.noise_scale }
    }

    pub fn delta_csv(&self) -> String {
        matrix_csv(self.n, &self.delta)
    }

    pub fn wightman_csv(&self) -> String {
        matrix_csv(self.n, &self.wightman)
    }
}

fn matrix_csv(n: usize, values: &[f64]) -> String {
    let mut out = (0..n).map(|i| i.to_string()).collect::<Vec<_>>().join(",");
    out.push('\n');
    for row in values.chunks(n.max(1)).take(n) {
        out.push_str(&row.iter().map(|v| fmt_f64(*v)).collect::<Vec<_>>().join(","));
        out.push('\n');
    }
    out
}

/// `α = √(1 + σ²/T²)`.
pub fn alpha(sigma: f64, duration: f64) -> f64 {
    let r = sigma / duration;
    (1.0 + r * r).sqrt()
}

/// `W(Λ_i, Λ_i) = 1 / (4π α²)`.
pub fn wightman_self(profile: &InteractionProfile) -> f64 {
    let a = alpha(profile.sigma, profile.duration);
    1.0 / (4.0 * PI * a * a)
}

/// `W(Λ_i, Λ_j) = T/(4√π α L) e^{-L²/(4α²T²)} erfi(L/(2αT))`.
///
/// Evaluated as `T D(u) / (2π α L)` with `u = L/(2αT)` and `D` Dawson's
/// integral, which avoids the overflow of `erfi` for large `u`.
pub fn wightman_pair(separation: f64, profile: &InteractionProfile) -> f64 {
    let a = alpha(profile.sigma, profile.duration);
    let u = separation / (2.0 * a * profile.duration);
    if u < 1e-8 {
        // D(u)/u = 1 - 2u²/3 + O(u⁴)
        return wightman_self(profile) * (1.0 - 2.0 * u * u / 3.0);
    }
    profile.duration * dawson(u) / (2.0 * PI * a * separation)
}

/// `Δ(Λ_i, Λ_j) = -T/(2√π α L) e^{-L²/(4α²T²)} erf(L/(2ασ))`.
pub fn delta_pair(separation: f64, profile: &InteractionProfile) -> f64 {
    let a = alpha(profile.sigma, profile.duration);
    let t = profile.duration;
    let gauss = (-(separation * separation) / (4.0 * a * a * t * t)).exp();
    -t / (2.0 * PI.sqrt() * a * separation) * gauss * erf(separation / (2.0 * a * profile.sigma))
}

/// Far-field form `-T / (2√π L)`, valid for `σ ≪ L ≪ T`.
pub fn delta_far_field(separation: f64, duration: f64) -> f64 {
    -duration / (2.0 * PI.sqrt() * separation)
}

/// Couplings for every qubit pair of `layout`.
pub fn coupling_matrix(layout: &QubitLayout, profile: &InteractionProfile) -> Result<CouplingMatrix> {
    profile.validate()?;
    let n = layout.len();
    let mut delta = vec![0.0; n * n];
    let mut wightman = vec![0.0; n * n];
    let w_self = wightman_self(profile);
    for i in 0..n {
        wightman[i * n + i] = w_self;
        for j in i + 1..n {
            let l = layout.separation(i, j);
            if l == 0.0 {
                return Err(Error::CoincidentPositions(i, j));
            }
            let d = delta_pair(l, profile);
            let w = wightman_pair(l, profile);
            delta[i * n + j] = d;
            delta[j * n + i] = d;
            wightman[i * n + j] = w;
            wightman[j * n + i] = w;
        }
    }
    CouplingMatrix::from_matrices(n, delta, wightman)
}

/// Lower bound `e^{-2λ²N²𝒲}` on the fidelity between the noisy entangling
/// channel and its unitary part, for any pure input.
pub fn fidelity_lower_bound(lambda: f64, num_qubits: usize, noise_scale: f64) -> f64 {
    let n = num_qubits as f64;
    (-2.0 * lambda * lambda * n * n * noise_scale).exp()
}

#[cfg(test)]
mod tests;

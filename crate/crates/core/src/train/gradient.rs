use super::LossDivisor;
use crate::error::{Error, Result};
use crate::field::CouplingMatrix;
use crate::linalg::{mat2_adjoint, mat2_mul, mat2_transpose, CMatrix, Mat2, C64, I, ZERO};
use crate::sim::{axis, entangler_phases, pauli_dot, rotation_matrix, CircuitParams, Rotation};

/// `(∂θ r, ∂ϑ r, ∂φ r)` for `r = cos θ I - i sin θ n(ϑ,φ)·σ`.
pub fn rotation_derivatives(rot: &Rotation) -> [Mat2; 3] {
    let (st, ct) = rot.theta.sin_cos();
    let (sv, cv) = rot.vartheta.sin_cos();
    let (sp, cp) = rot.varphi.sin_cos();
    let n = axis(rot.vartheta, rot.varphi);
    let dn_dvartheta = [cv * cp, cv * sp, -sv];
    let dn_dvarphi = [-sv * sp, sv * cp, 0.0];
    let comb = |id: f64, coeff: C64, g: Mat2| -> Mat2 {
        let mut m = [[ZERO; 2]; 2];
        for r in 0..2 {
            for k in 0..2 {
                let diag = if r == k { id } else { 0.0 };
                m[r][k] = C64::new(diag, 0.0) + coeff * g[r][k];
            }
        }
        m
    };
    [
        comb(-st, -I * ct, pauli_dot(n)),
        comb(0.0, -I * st, pauli_dot(dn_dvartheta)),
        comb(0.0, -I * st, pauli_dot(dn_dvarphi)),
    ]
}

/// `(1/n) Σ_ij |U_ij - V_ij|²` with `n` set by `divisor`.
pub fn hs_loss(u_model: &CMatrix, u_target: &CMatrix, num_qubits: usize, divisor: LossDivisor) -> Result<f64> {
    if u_model.rows() != u_target.rows() || u_model.cols() != u_target.cols() {
        return Err(Error::DimensionMismatch { expected: u_target.rows(), found: u_model.rows() });
    }
    let sum: f64 = u_model.as_slice().iter().zip(u_target.as_slice()).map(|(a, b)| (a - b).norm_sqr()).sum();
    Ok(sum / divisor.value(num_qubits))
}

#[inline]
fn dot(a: &[C64], b: &[C64]) -> C64 {
    // independent lanes so the loop vectorizes
    let mut re = [0.0; 4];
    let mut im = [0.0; 4];
    let (ca, ra) = (a.chunks_exact(4), a.chunks_exact(4).remainder());
    let rb = b.chunks_exact(4).remainder();
    for (x, y) in ca.zip(b.chunks_exact(4)) {
        for k in 0..4 {
            re[k] += x[k].re * y[k].re - x[k].im * y[k].im;
            im[k] += x[k].re * y[k].im + x[k].im * y[k].re;
        }
    }
    for (x, y) in ra.iter().zip(rb) {
        re[0] += x.re * y.re - x.im * y.im;
        im[0] += x.re * y.im + x.im * y.re;
    }
    C64::new((re[0] + re[1]) + (re[2] + re[3]), (im[0] + im[1]) + (im[2] + im[3]))
}

/// Loss and its exact gradient (flattened like [`CircuitParams::to_flat`]).
///
/// With `U = C R_D ⋯ C R_1` and `G = (U - V)/n`, `∂L = 2 Re tr(G† ∂U)`.
/// Prefixes `P_ℓ = C R_ℓ ⋯ C R_1` are stored on the forward pass. The
/// backward pass carries `B_ℓ = G† C R_D ⋯ R_{ℓ+1} C` (kept transposed so
/// that every contraction is a contiguous row dot product). A parameter of
/// qubit `q` in layer `ℓ` then needs only the partial trace onto `q` of
/// `K = P_{ℓ-1} B_ℓ R_ℓ`, contracted with `r_q† ∂r_q`.
pub fn loss_and_gradient(
    params: &CircuitParams,
    coupling: &CouplingMatrix,
    lambda: f64,
    u_target: &CMatrix,
    divisor: LossDivisor,
) -> Result<(f64, Vec<f64>)> {
    let n = params.num_qubits();
    if coupling.num_qubits() != n {
        return Err(Error::DimensionMismatch { expected: n, found: coupling.num_qubits() });
    }
    let dim = 1usize << n;
    if u_target.rows() != dim || u_target.cols() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: u_target.rows() });
    }
    let phases = entangler_phases(coupling, lambda);
    let layers = params.layers();
    let rots: Vec<Vec<Mat2>> = layers
        .iter()
        .map(|l| l.rotations.iter().map(|r| rotation_matrix(r.theta, r.vartheta, r.varphi)).collect())
        .collect();

    let mut prefixes = Vec::with_capacity(layers.len() + 1);
    prefixes.push(CMatrix::identity(dim));
    for layer in &rots {
        let mut p = prefixes.last().expect("identity prefix").clone();
        for (q, r) in layer.iter().enumerate() {
            p.apply_left_1q(q, r);
        }
        p.scale_rows(&phases);
        prefixes.push(p);
    }
    let u = prefixes.last().expect("full product");
    let norm = divisor.value(n);
    let loss = hs_loss(u, u_target, n, divisor)?;

    // Bᵀ_D = (G† C)ᵀ = C conj(G)
    let mut bt = CMatrix::from_fn(dim, dim, |r, c| ((u[(r, c)] - u_target[(r, c)]) / norm).conj());
    bt.scale_rows(&phases);

    let mut grad = vec![0.0; params.len()];
    for l in (0..layers.len()).rev() {
        // Sᵀ = (B_ℓ R_ℓ)ᵀ = R_ℓᵀ Bᵀ_ℓ
        for (q, r) in rots[l].iter().enumerate() {
            bt.apply_left_1q(q, &mat2_transpose(r));
        }
        let prev = &prefixes[l];
        for q in 0..n {
            let bit = 1usize << q;
            let mut kappa = [[ZERO; 2]; 2];
            for i in 0..dim {
                let a = usize::from(i & bit != 0);
                let row = prev.row(i);
                let base = i & !bit;
                kappa[a][0] += dot(row, bt.row(base));
                kappa[a][1] += dot(row, bt.row(base | bit));
            }
            let rot = &layers[l].rotations[q];
            let r_adj = mat2_adjoint(&rots[l][q]);
            for (p, d) in rotation_derivatives(rot).iter().enumerate() {
                let x = mat2_mul(&r_adj, d);
                let mut tr = ZERO;
                for a in 0..2 {
                    for b in 0..2 {
                        tr += x[b][a] * kappa[a][b];
                    }
                }
                grad[3 * (l * n + q) + p] = 2.0 * tr.re;
            }
        }
        // Bᵀ_{ℓ-1} = (B_ℓ R_ℓ C)ᵀ = C Sᵀ
        bt.scale_rows(&phases);
    }
    Ok((loss, grad))
}

/// Gradient only; see [`loss_and_gradient`].
pub fn loss_gradient(
    params: &CircuitParams,
    coupling: &CouplingMatrix,
    lambda: f64,
    u_target: &CMatrix,
    divisor: LossDivisor,
) -> Result<Vec<f64>> {
    Ok(loss_and_gradient(params, coupling, lambda, u_target, divisor)?.1)
}

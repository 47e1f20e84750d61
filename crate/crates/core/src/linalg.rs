//! Small dense complex matrix type used for unitaries and density matrices.
//!
//! Storage is row-major. Qubit `q` corresponds to bit `q` of a basis index,
//! counted from the least significant bit, so a Kronecker product of
//! single-qubit operators is written `op_{N-1} ⊗ ... ⊗ op_0`.

use std::ops::{Index, IndexMut, Mul};

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// 2×2 complex matrix, `m[row][col]`.
pub type Mat2 = [[C64; 2]; 2];

pub fn mat2_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[ZERO; 2]; 2];
    for r in 0..2 {
        for c in 0..2 {
            out[r][c] = a[r][0] * b[0][c] + a[r][1] * b[1][c];
        }
    }
    out
}

pub fn mat2_adjoint(a: &Mat2) -> Mat2 {
    [[a[0][0].conj(), a[1][0].conj()], [a[0][1].conj(), a[1][1].conj()]]
}

pub fn mat2_transpose(a: &Mat2) -> Mat2 {
    [[a[0][0], a[1][0]], [a[0][1], a[1][1]]]
}

#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m.data[i * dim + i] = ONE;
        }
        m
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, d) in diag.iter().enumerate() {
            m.data[i * n + i] = *d;
        }
        m
    }

    /// Builds a matrix from row-major data. Panics if the length is wrong.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<C64>) -> Self {
        assert_eq!(data.len(), rows * cols, "row-major data has wrong length");
        Self { rows, cols, data }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn row(&self, r: usize) -> &[C64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x * s).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect() }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            let out_row = &mut out.data[r * other.cols..(r + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[r * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let b_row = &other.data[k * other.cols..(k + 1) * other.cols];
                for (o, b) in out_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len(), "matvec dimension mismatch");
        (0..self.rows).map(|r| self.row(r).iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }

    pub fn kron(&self, other: &Self) -> Self {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        Self::from_fn(rows, cols, |r, c| {
            self[(r / other.rows, c / other.cols)] * other[(r % other.rows, c % other.cols)]
        })
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|x| x.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// Squared Frobenius (Hilbert-Schmidt) norm.
    pub fn frobenius_norm_sqr(&self) -> f64 {
        self.data.iter().map(|x| x.norm_sqr()).sum()
    }

    /// `max |U†U - I|` over all entries.
    pub fn unitarity_residual(&self) -> f64 {
        self.adjoint().matmul(self).max_abs_diff(&Self::identity(self.cols))
    }

    pub fn hermiticity_residual(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    /// Applies a 2×2 operator to qubit `q` from the left: `M ← (op on q) · M`.
    pub fn apply_left_1q(&mut self, q: usize, op: &Mat2) {
        let bit = 1usize << q;
        let cols = self.cols;
        for r0 in 0..self.rows {
            if r0 & bit != 0 {
                continue;
            }
            let r1 = r0 | bit;
            let (head, tail) = self.data.split_at_mut(r1 * cols);
            let row0 = &mut head[r0 * cols..(r0 + 1) * cols];
            let row1 = &mut tail[..cols];
            mix_rows(row0, row1, op);
        }
    }

    /// Applies a 2×2 operator to qubit `q` from the right: `M ← M · (op on q)`.
    pub fn apply_right_1q(&mut self, q: usize, op: &Mat2) {
        let bit = 1usize << q;
        let cols = self.cols;
        for row in self.data.chunks_exact_mut(cols) {
            for c0 in 0..cols {
                if c0 & bit != 0 {
                    continue;
                }
                let c1 = c0 | bit;
                let x0 = row[c0];
                let x1 = row[c1];
                row[c0] = x0 * op[0][0] + x1 * op[1][0];
                row[c1] = x0 * op[0][1] + x1 * op[1][1];
            }
        }
    }

    /// `M ← diag(d) · M`.
    pub fn scale_rows(&mut self, d: &[C64]) {
        assert_eq!(d.len(), self.rows);
        for (row, s) in self.data.chunks_exact_mut(self.cols).zip(d) {
            for x in row {
                *x *= s;
            }
        }
    }

    /// `M ← M · diag(d)`.
    pub fn scale_cols(&mut self, d: &[C64]) {
        assert_eq!(d.len(), self.cols);
        for row in self.data.chunks_exact_mut(self.cols) {
            for (x, s) in row.iter_mut().zip(d) {
                *x *= s;
            }
        }
    }

    pub fn to_nalgebra(&self) -> DMatrix<C64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    /// Eigenvalues of a Hermitian matrix, ascending.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        let h = self.to_nalgebra();
        let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// Singular values, descending.
    pub fn singular_values(&self) -> Vec<f64> {
        let mut sv: Vec<f64> = self.to_nalgebra().singular_values().iter().copied().collect();
        sv.sort_by(|a, b| b.total_cmp(a));
        sv
    }

    /// Row-major CSV with real and imaginary parts interleaved per entry.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let header: Vec<String> = (0..self.cols).flat_map(|c| [format!("re{c}"), format!("im{c}")]).collect();
        out.push_str(&header.join(","));
        out.push('\n');
        for r in 0..self.rows {
            let line: Vec<String> = self.row(r).iter().flat_map(|z| [fmt_f64(z.re), fmt_f64(z.im)]).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.data[r * self.cols + c]
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        self.matmul(rhs)
    }
}

/// Distance between two operators after optimizing over a global phase:
/// `min_φ max_ij |A_ij - e^{iφ} B_ij|`, with `φ` fixed by `arg tr(B†A)`.
pub fn phase_min_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    let overlap: C64 = a.as_slice().iter().zip(b.as_slice()).map(|(x, y)| y.conj() * x).sum();
    let phase = if overlap.norm() > 0.0 { overlap / overlap.norm() } else { ONE };
    a.max_abs_diff(&b.scale(phase))
}

/// Trace norm distance `½‖A - B‖₁` for Hermitian arguments.
pub fn trace_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    0.5 * a.sub(b).hermitian_eigenvalues().iter().map(|e| e.abs()).sum::<f64>()
}

/// Formats a float with 17 significant digits, enough for a lossless round trip.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// `(row0, row1) ← op · (row0, row1)`, written out in real arithmetic so the
/// loop vectorizes.
fn mix_rows(row0: &mut [C64], row1: &mut [C64], op: &Mat2) {
    let [[a, b], [c, d]] = *op;
    for (x, y) in row0.iter_mut().zip(row1.iter_mut()) {
        let (x0r, x0i, x1r, x1i) = (x.re, x.im, y.re, y.im);
        x.re = a.re * x0r - a.im * x0i + b.re * x1r - b.im * x1i;
        x.im = a.re * x0i + a.im * x0r + b.re * x1i + b.im * x1r;
        y.re = c.re * x0r - c.im * x0i + d.re * x1r - d.im * x1i;
        y.im = c.re * x0i + c.im * x0r + d.re * x1i + d.im * x1r;
    }
}

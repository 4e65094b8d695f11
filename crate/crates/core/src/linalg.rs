//! Dense complex matrix kernel.
//!
//! Everything downstream (states, Choi matrices, LMI blocks) reduces to the
//! operations in this module: the cyclic Jacobi Hermitian eigensolver, trace
//! norms, Kronecker products and partial traces. Storage is row-major and
//! dense; the matrices handled here never exceed a few dozen rows.

use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type C64 = Complex64;

/// Tolerance for accepting a matrix as Hermitian before decomposition.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Sweep cap for the Jacobi eigensolver.
pub const MAX_JACOBI_SWEEPS: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("matrix is not Hermitian (max |A_ij - conj(A_ji)| = {defect:e})")]
    NotHermitian { defect: f64 },
    #[error("Jacobi iteration did not converge within {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("entry count {len} does not match shape {rows}x{cols}")]
    BadShape { rows: usize, cols: usize, len: usize },
}

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Dense complex matrix in row-major order.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for col in 0..self.cols {
                let z = self[(r, col)];
                write!(f, "{:+.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self, LinalgError> {
        if data.len() != rows * cols {
            return Err(LinalgError::BadShape {
                rows,
                cols,
                len: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = re(1.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for col in 0..cols {
                data.push(f(r, col));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = re(d);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self, LinalgError> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(nrows * ncols);
        for row in rows {
            if row.len() != ncols {
                return Err(LinalgError::DimensionMismatch {
                    expected: format!("{ncols} columns"),
                    found: format!("{} columns", row.len()),
                });
            }
            data.extend_from_slice(row);
        }
        Self::new(nrows, ncols, data)
    }

    /// Column vector from amplitudes.
    pub fn column(v: &[C64]) -> Self {
        Self {
            rows: v.len(),
            cols: 1,
            data: v.to_vec(),
        }
    }

    /// `|v><w|`
    pub fn outer(v: &[C64], w: &[C64]) -> Self {
        Self::from_fn(v.len(), w.len(), |r, col| v[r] * w[col].conj())
    }

    /// `|i><j|` in dimension `n`.
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(n, n);
        m[(i, j)] = re(1.0);
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn col_vec(&self, col: usize) -> Vec<C64> {
        (0..self.rows).map(|r| self[(r, col)]).collect()
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    pub fn real_diagonal(&self) -> Vec<f64> {
        self.diagonal().into_iter().map(|z| z.re).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, col| self[(col, r)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, col| self[(col, r)])
    }

    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        self.scale_complex(re(s))
    }

    pub fn scale_complex(&self, s: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn trace(&self) -> C64 {
        self.diagonal().into_iter().sum()
    }

    /// `(A + A†)/2`
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |r, col| {
            (self[(r, col)] + self[(col, r)].conj()) * 0.5
        })
    }

    /// `max_ij |A_ij - conj(A_ji)|`; infinite for non-square input.
    pub fn hermitian_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst = 0.0f64;
        for r in 0..self.rows {
            for col in r..self.cols {
                worst = worst.max((self[(r, col)] - self[(col, r)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_defect() <= tol
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest absolute off-diagonal entry.
    pub fn max_off_diagonal(&self) -> f64 {
        let mut worst = 0.0f64;
        for r in 0..self.rows {
            for col in 0..self.cols {
                if r != col {
                    worst = worst.max(self[(r, col)].norm());
                }
            }
        }
        worst
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(
            self.cols, other.rows,
            "matmul shape mismatch: {}x{} * {}x{}",
            self.rows, self.cols, other.rows, other.cols
        );
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[r * self.cols + k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let orow = &other.data[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out.data[r * other.cols..(r + 1) * other.cols];
                for (d, b) in dst.iter_mut().zip(orow) {
                    *d += a * b;
                }
            }
        }
        out
    }

    /// `Tr(A B)` without forming the product.
    pub fn trace_product(&self, other: &Self) -> C64 {
        assert_eq!(self.cols, other.rows);
        assert_eq!(self.rows, other.cols);
        let mut acc = C64::new(0.0, 0.0);
        for r in 0..self.rows {
            for k in 0..self.cols {
                acc += self[(r, k)] * other[(k, r)];
            }
        }
        acc
    }

    /// Real Hilbert-Schmidt inner product `Re Tr(A† B)`.
    pub fn real_inner(&self, other: &Self) -> f64 {
        assert_eq!(self.shape(), other.shape());
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a.conj() * b).re)
            .sum()
    }

    /// Sub-block `[r0..r0+nr, c0..c0+nc]`.
    pub fn block(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> Self {
        Self::from_fn(nr, nc, |r, col| self[(r0 + r, c0 + col)])
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, b: &Self) {
        for r in 0..b.rows {
            for col in 0..b.cols {
                self[(r0 + r, c0 + col)] = b[(r, col)];
            }
        }
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.shape() == other.shape() && (self - other).max_abs() <= tol
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (r, col): (usize, usize)) -> &C64 {
        &self.data[r * self.cols + col]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (r, col): (usize, usize)) -> &mut C64 {
        &mut self.data[r * self.cols + col]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.shape(), rhs.shape());
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.shape(), rhs.shape());
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        self.scale(-1.0)
    }
}

impl AddAssign<&ComplexMatrix> for ComplexMatrix {
    fn add_assign(&mut self, rhs: &ComplexMatrix) {
        assert_eq!(self.shape(), rhs.shape());
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a += b;
        }
    }
}

impl SubAssign<&ComplexMatrix> for ComplexMatrix {
    fn sub_assign(&mut self, rhs: &ComplexMatrix) {
        assert_eq!(self.shape(), rhs.shape());
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a -= b;
        }
    }
}

fn require_square(a: &ComplexMatrix) -> Result<usize, LinalgError> {
    if a.is_square() {
        Ok(a.rows)
    } else {
        Err(LinalgError::NonSquare {
            rows: a.rows,
            cols: a.cols,
        })
    }
}

/// Eigendecomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEig {
    /// Eigenvalues in descending order.
    pub values: Vec<f64>,
    /// Unitary whose columns are the matching eigenvectors.
    pub vectors: ComplexMatrix,
}

impl HermitianEig {
    /// `V f(Λ) V†`
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.values.len();
        let fv: Vec<f64> = self.values.iter().map(|&l| f(l)).collect();
        let v = &self.vectors;
        ComplexMatrix::from_fn(n, n, |r, col| {
            let mut acc = C64::new(0.0, 0.0);
            for k in 0..n {
                if fv[k] != 0.0 {
                    acc += v[(r, k)] * v[(col, k)].conj() * fv[k];
                }
            }
            acc
        })
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.reconstruct_with(|l| l)
    }

    pub fn min(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }
}

/// Hermitian eigendecomposition by cyclic complex Jacobi rotations.
///
/// The input is checked against [`HERMITIAN_TOL`] and then symmetrized.
pub fn herm_eig(a: &ComplexMatrix) -> Result<HermitianEig, LinalgError> {
    let n = require_square(a)?;
    let scale = a.max_abs().max(1.0);
    let defect = a.hermitian_defect();
    if defect > HERMITIAN_TOL * scale {
        return Err(LinalgError::NotHermitian { defect });
    }
    let mut m = a.hermitian_part();
    for i in 0..n {
        m[(i, i)] = re(m[(i, i)].re);
    }
    let mut v = ComplexMatrix::identity(n);
    let frob = m.frobenius_norm();
    let threshold = f64::EPSILON * frob * 1e-2;

    let mut converged = n <= 1;
    let mut sweeps = 0;
    while !converged {
        if sweeps >= MAX_JACOBI_SWEEPS {
            return Err(LinalgError::NoConvergence { sweeps });
        }
        sweeps += 1;
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += m[(p, q)].norm_sqr();
            }
        }
        if off.sqrt() <= threshold || off == 0.0 {
            break;
        }
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                let mag = apq.norm();
                if mag <= threshold * 1e-3 || mag == 0.0 {
                    continue;
                }
                rotated = true;
                rotate(&mut m, &mut v, p, q, apq, mag);
            }
        }
        if !rotated {
            converged = true;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| m[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[j].total_cmp(&diag[i]));
    let values = order.iter().map(|&i| diag[i]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |r, col| v[(r, order[col])]);
    Ok(HermitianEig { values, vectors })
}

// Phase q by e^{-i phi} so that a_pq becomes real, then a real Jacobi rotation.
fn rotate(m: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize, apq: C64, mag: f64) {
    let n = m.rows;
    let phase = apq / mag;
    let app = m[(p, p)].re;
    let aqq = m[(q, q)].re;
    let theta = (aqq - app) / (2.0 * mag);
    let t = if theta == 0.0 {
        1.0
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let cs = 1.0 / (t * t + 1.0).sqrt();
    let sn = t * cs;
    let ph = phase.conj();
    let g_pp = re(cs);
    let g_pq = re(sn);
    let g_qp = ph * (-sn);
    let g_qq = ph * cs;

    for k in 0..n {
        let akp = m[(k, p)];
        let akq = m[(k, q)];
        m[(k, p)] = akp * g_pp + akq * g_qp;
        m[(k, q)] = akp * g_pq + akq * g_qq;
    }
    for k in 0..n {
        let apk = m[(p, k)];
        let aqk = m[(q, k)];
        m[(p, k)] = g_pp.conj() * apk + g_qp.conj() * aqk;
        m[(q, k)] = g_pq.conj() * apk + g_qq.conj() * aqk;
    }
    m[(p, q)] = re(0.0);
    m[(q, p)] = re(0.0);
    m[(p, p)] = re(m[(p, p)].re);
    m[(q, q)] = re(m[(q, q)].re);
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * g_pp + vkq * g_qp;
        v[(k, q)] = vkp * g_pq + vkq * g_qq;
    }
}

/// Eigenvalues only, descending.
pub fn eigvalsh(a: &ComplexMatrix) -> Result<Vec<f64>, LinalgError> {
    herm_eig(a).map(|e| e.values)
}

/// Singular values (descending) via the Hermitian dilation `[[0, A], [A†, 0]]`.
pub fn singular_values(a: &ComplexMatrix) -> Result<Vec<f64>, LinalgError> {
    let (r, cl) = a.shape();
    let mut dil = ComplexMatrix::zeros(r + cl, r + cl);
    dil.set_block(0, r, a);
    dil.set_block(r, 0, &a.adjoint());
    let vals = eigvalsh(&dil)?;
    Ok(vals.into_iter().take(r.min(cl)).map(|x| x.max(0.0)).collect())
}

/// Trace norm `Tr|A|`. Exactly Hermitian inputs use eigenvalues, everything
/// else goes through singular values.
pub fn trace_norm(a: &ComplexMatrix) -> Result<f64, LinalgError> {
    require_square(a)?;
    let scale = a.max_abs().max(1.0);
    if a.hermitian_defect() <= 1e-14 * scale {
        Ok(eigvalsh(a)?.iter().map(|l| l.abs()).sum())
    } else {
        Ok(singular_values(a)?.iter().sum())
    }
}

/// Operator (spectral) norm.
pub fn operator_norm(a: &ComplexMatrix) -> Result<f64, LinalgError> {
    Ok(singular_values(a)?.first().copied().unwrap_or(0.0))
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    ComplexMatrix::from_fn(ar * br, ac * bc, |r, col| {
        a[(r / br, col / bc)] * b[(r % br, col % bc)]
    })
}

pub fn kron_vec(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect()
}

/// Subsystem of a bipartite operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Subsystem {
    A,
    B,
}

fn require_bipartite(x: &ComplexMatrix, (da, db): (usize, usize)) -> Result<(), LinalgError> {
    let n = da * db;
    if x.shape() != (n, n) {
        return Err(LinalgError::DimensionMismatch {
            expected: format!("{n}x{n}"),
            found: format!("{}x{}", x.rows, x.cols),
        });
    }
    Ok(())
}

/// Trace out subsystem `which` of an operator on `C^{d_A} ⊗ C^{d_B}`.
pub fn partial_trace(
    x: &ComplexMatrix,
    dims: (usize, usize),
    which: Subsystem,
) -> Result<ComplexMatrix, LinalgError> {
    require_bipartite(x, dims)?;
    let (da, db) = dims;
    Ok(match which {
        Subsystem::B => ComplexMatrix::from_fn(da, da, |a, a2| {
            (0..db).map(|b| x[(a * db + b, a2 * db + b)]).sum()
        }),
        Subsystem::A => ComplexMatrix::from_fn(db, db, |b, b2| {
            (0..da).map(|a| x[(a * db + b, a * db + b2)]).sum()
        }),
    })
}

/// Transpose subsystem `which` of a bipartite operator.
pub fn partial_transpose(
    x: &ComplexMatrix,
    dims: (usize, usize),
    which: Subsystem,
) -> Result<ComplexMatrix, LinalgError> {
    require_bipartite(x, dims)?;
    let (da, db) = dims;
    let n = da * db;
    Ok(ComplexMatrix::from_fn(n, n, |r, col| {
        let (a, b) = (r / db, r % db);
        let (a2, b2) = (col / db, col % db);
        match which {
            Subsystem::B => x[(a * db + b2, a2 * db + b)],
            Subsystem::A => x[(a2 * db + b, a * db + b2)],
        }
    }))
}

/// Lower Cholesky factor of a Hermitian positive definite matrix.
pub fn cholesky(a: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
    let n = require_square(a)?;
    let mut l = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if !(d > 0.0) || !d.is_finite() {
            return Err(LinalgError::NotPositiveDefinite);
        }
        let djj = d.sqrt();
        l[(j, j)] = re(djj);
        for i in j + 1..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / djj;
        }
    }
    Ok(l)
}

/// Inverse of a lower-triangular matrix.
pub fn lower_triangular_inverse(l: &ComplexMatrix) -> ComplexMatrix {
    let n = l.rows;
    let mut inv = ComplexMatrix::zeros(n, n);
    for col in 0..n {
        inv[(col, col)] = re(1.0) / l[(col, col)];
        for r in col + 1..n {
            let mut s = C64::new(0.0, 0.0);
            for k in col..r {
                s += l[(r, k)] * inv[(k, col)];
            }
            inv[(r, col)] = -s / l[(r, r)];
        }
    }
    inv
}

/// Inverse of a Hermitian positive definite matrix via Cholesky.
pub fn hpd_inverse(a: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
    let l = cholesky(a)?;
    let li = lower_triangular_inverse(&l);
    Ok(li.adjoint().matmul(&li))
}

/// Apply a scalar function to the spectrum of a Hermitian matrix.
pub fn hermitian_function(
    a: &ComplexMatrix,
    f: impl Fn(f64) -> f64,
) -> Result<ComplexMatrix, LinalgError> {
    Ok(herm_eig(a)?.reconstruct_with(f))
}

/// Square root of a PSD matrix, negative eigenvalues clipped to zero.
pub fn sqrt_psd(a: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
    hermitian_function(a, |l| l.max(0.0).sqrt())
}

/// Maximum deviation of `U†U` from the identity.
pub fn unitarity_defect(u: &ComplexMatrix) -> f64 {
    if !u.is_square() {
        return f64::INFINITY;
    }
    (&u.adjoint().matmul(u) - &ComplexMatrix::identity(u.rows)).max_abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pauli_x() -> ComplexMatrix {
        ComplexMatrix::from_rows(&[vec![re(0.0), re(1.0)], vec![re(1.0), re(0.0)]]).unwrap()
    }

    fn pauli_z() -> ComplexMatrix {
        ComplexMatrix::from_real_diagonal(&[1.0, -1.0])
    }

    fn hermitian_from(n: usize, vals: &[f64]) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(n, n);
        let mut k = 0;
        for r in 0..n {
            m[(r, r)] = re(vals[k]);
            k += 1;
            for col in r + 1..n {
                let z = c(vals[k], vals[k + 1]);
                k += 2;
                m[(r, col)] = z;
                m[(col, r)] = z.conj();
            }
        }
        m
    }

    fn herm_strategy(n: usize) -> impl Strategy<Value = ComplexMatrix> {
        prop::collection::vec(-1.0f64..1.0, n * n).prop_map(move |v| hermitian_from(n, &v))
    }

    fn square_strategy(n: usize) -> impl Strategy<Value = ComplexMatrix> {
        prop::collection::vec(-1.0f64..1.0, 2 * n * n).prop_map(move |v| {
            ComplexMatrix::from_fn(n, n, |r, col| c(v[2 * (r * n + col)], v[2 * (r * n + col) + 1]))
        })
    }

    fn unitary_from(a: &ComplexMatrix) -> ComplexMatrix {
        // polar factor of (A + 2I)
        let b = &ComplexMatrix::identity(a.rows).scale(2.0) + a;
        let bb = b.adjoint().matmul(&b);
        let inv_sqrt = hermitian_function(&bb, |l| 1.0 / l.sqrt()).unwrap();
        b.matmul(&inv_sqrt)
    }

    #[test]
    fn pauli_z_is_already_diagonal() {
        let e = herm_eig(&pauli_z()).unwrap();
        assert_eq!(e.values, vec![1.0, -1.0]);
        assert!(e.vectors.approx_eq(&ComplexMatrix::identity(2), 1e-15));
    }

    #[test]
    fn pauli_x_eigenvectors_are_plus_minus() {
        let e = herm_eig(&pauli_x()).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-14);
        assert!((e.values[1] + 1.0).abs() < 1e-14);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let plus = e.vectors.col_vec(0);
        let minus = e.vectors.col_vec(1);
        // up to a global phase
        let overlap_plus = (plus[0] * s + plus[1] * s).norm();
        let overlap_minus = (minus[0] * s - minus[1] * s).norm();
        assert!((overlap_plus - 1.0).abs() < 1e-14);
        assert!((overlap_minus - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = ComplexMatrix::from_rows(&[vec![re(0.0), re(1.0)], vec![re(0.0), re(0.0)]]).unwrap();
        assert!(matches!(herm_eig(&m), Err(LinalgError::NotHermitian { .. })));
        let r = ComplexMatrix::zeros(2, 3);
        assert!(matches!(trace_norm(&r), Err(LinalgError::NonSquare { .. })));
    }

    #[test]
    fn trace_norm_examples() {
        assert!((trace_norm(&pauli_z()).unwrap() - 2.0).abs() < 1e-15);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let plus = ComplexMatrix::outer(&[re(s), re(s)], &[re(s), re(s)]);
        let d = &plus - &ComplexMatrix::identity(2).scale(0.5);
        assert!((trace_norm(&d).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn degenerate_spectrum() {
        let m = ComplexMatrix::identity(4).scale(3.0);
        let e = herm_eig(&m).unwrap();
        assert!(e.values.iter().all(|&l| (l - 3.0).abs() < 1e-15));
        let z = ComplexMatrix::zeros(3, 3);
        assert_eq!(herm_eig(&z).unwrap().values, vec![0.0; 3]);
    }

    #[test]
    fn bell_state_marginal_is_maximally_mixed() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let phi = [re(s), re(0.0), re(0.0), re(s)];
        let bell = ComplexMatrix::outer(&phi, &phi);
        let ra = partial_trace(&bell, (2, 2), Subsystem::B).unwrap();
        assert!(ra.approx_eq(&ComplexMatrix::identity(2).scale(0.5), 1e-15));
        let rb = partial_trace(&bell, (2, 2), Subsystem::A).unwrap();
        assert!(rb.approx_eq(&ComplexMatrix::identity(2).scale(0.5), 1e-15));
    }

    #[test]
    fn partial_trace_rejects_bad_dims() {
        let x = ComplexMatrix::identity(5);
        assert!(matches!(
            partial_trace(&x, (2, 2), Subsystem::A),
            Err(LinalgError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn partial_transpose_of_bell_has_negative_eigenvalue() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let phi = [re(s), re(0.0), re(0.0), re(s)];
        let bell = ComplexMatrix::outer(&phi, &phi);
        let pt = partial_transpose(&bell, (2, 2), Subsystem::B).unwrap();
        let vals = eigvalsh(&pt).unwrap();
        assert!((vals[3] + 0.5).abs() < 1e-14);
        let pta = partial_transpose(&bell, (2, 2), Subsystem::A).unwrap();
        assert!(pta.approx_eq(&pt, 1e-15));
    }

    #[test]
    fn cholesky_inverse_roundtrip() {
        let a = ComplexMatrix::from_rows(&[
            vec![re(4.0), c(1.0, 1.0), re(0.0)],
            vec![c(1.0, -1.0), re(3.0), c(0.0, 0.5)],
            vec![re(0.0), c(0.0, -0.5), re(2.0)],
        ])
        .unwrap();
        let inv = hpd_inverse(&a).unwrap();
        assert!(a.matmul(&inv).approx_eq(&ComplexMatrix::identity(3), 1e-14));
        assert!(matches!(
            cholesky(&pauli_z()),
            Err(LinalgError::NotPositiveDefinite)
        ));
    }

    proptest! {
        #[test]
        fn reconstruction_and_unitarity(a in herm_strategy(4)) {
            let e = herm_eig(&a).unwrap();
            let resid = (&e.reconstruct() - &a).frobenius_norm();
            prop_assert!(resid <= 1e-10, "residual {resid}");
            prop_assert!(unitarity_defect(&e.vectors) <= 1e-10);
            let sum: f64 = e.values.iter().sum();
            prop_assert!((sum - a.trace().re).abs() <= 1e-10);
            prop_assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
        }

        #[test]
        fn trace_norm_matches_eigenvalue_oracle(a in herm_strategy(3)) {
            let tn = trace_norm(&a).unwrap();
            let vals = eigvalsh(&a).unwrap();
            let oracle: f64 = vals.iter().map(|l| l.abs()).sum();
            prop_assert!((tn - oracle).abs() <= 1e-12);
            prop_assert!(tn >= a.trace().norm() - 1e-12);
            // general path agrees on Hermitian input
            let sv: f64 = singular_values(&a).unwrap().iter().sum();
            prop_assert!((sv - tn).abs() <= 1e-10);
        }

        #[test]
        fn trace_norm_unitary_invariance(a in square_strategy(3), u0 in square_strategy(3), v0 in square_strategy(3)) {
            let u = unitary_from(&u0);
            let v = unitary_from(&v0);
            let lhs = trace_norm(&u.matmul(&a).matmul(&v)).unwrap();
            let rhs = trace_norm(&a).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-10);
        }

        #[test]
        fn trace_norm_triangle(a in square_strategy(3), b in square_strategy(3)) {
            let lhs = trace_norm(&(&a + &b)).unwrap();
            let rhs = trace_norm(&a).unwrap() + trace_norm(&b).unwrap();
            prop_assert!(lhs <= rhs + 1e-10);
        }

        #[test]
        fn partial_trace_matches_index_sum(x in square_strategy(4)) {
            // direct summation oracle over the 2x2 factorization
            let mut oracle_b = ComplexMatrix::zeros(2, 2);
            let mut oracle_a = ComplexMatrix::zeros(2, 2);
            for i in 0..2 { for j in 0..2 { for k in 0..2 {
                oracle_b[(i, j)] += x[(2 * i + k, 2 * j + k)];
                oracle_a[(i, j)] += x[(2 * k + i, 2 * k + j)];
            }}}
            prop_assert!(partial_trace(&x, (2, 2), Subsystem::B).unwrap().approx_eq(&oracle_b, 1e-12));
            prop_assert!(partial_trace(&x, (2, 2), Subsystem::A).unwrap().approx_eq(&oracle_a, 1e-12));
            let tr = partial_trace(&x, (2, 2), Subsystem::B).unwrap().trace();
            prop_assert!((tr - x.trace()).norm() <= 1e-12);
        }

        #[test]
        fn partial_trace_is_adjoint_of_tensoring(x in square_strategy(6), a in square_strategy(2)) {
            let lhs = partial_trace(&x, (2, 3), Subsystem::B).unwrap().trace_product(&a);
            let rhs = x.trace_product(&kron(&a, &ComplexMatrix::identity(3)));
            prop_assert!((lhs - rhs).norm() <= 1e-12);
        }

        #[test]
        fn partial_trace_of_product(a in square_strategy(2), b in herm_strategy(3)) {
            let pt = partial_trace(&kron(&a, &b), (2, 3), Subsystem::B).unwrap();
            prop_assert!(pt.approx_eq(&a.scale_complex(b.trace()), 1e-12));
        }
    }
}

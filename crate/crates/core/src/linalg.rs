//! Small dense linear-algebra kernels: a row-major matrix type, a cyclic
//! Jacobi eigensolver for real symmetric matrices and a Householder QR with
//! non-negative `diag(R)`.
//!
//! Sizes here never exceed a few thousand rows, so everything is plain
//! `Vec`-backed storage with cache-friendly loop orders.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Field element usable in [`Matrix`].
pub trait Scalar:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + PartialEq + fmt::Debug
{
    fn zero() -> Self;
    fn one() -> Self;
    fn conj(self) -> Self;
    fn modulus(self) -> f64;
    fn from_real(x: f64) -> Self;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn conj(self) -> Self {
        self
    }
    fn modulus(self) -> f64 {
        self.abs()
    }
    fn from_real(x: f64) -> Self {
        x
    }
}

impl Scalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn conj(self) -> Self {
        Complex64::conj(&self)
    }
    fn modulus(self) -> f64 {
        self.norm()
    }
    fn from_real(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
}

#[derive(Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from row-major data.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                actual: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
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

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[T] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [T] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    /// Mutable access to two distinct rows at once.
    fn rows_pair_mut(&mut self, a: usize, b: usize) -> (&mut [T], &mut [T]) {
        assert_ne!(a, b);
        let cols = self.cols;
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let (head, tail) = self.data.split_at_mut(hi * cols);
        let lo_row = &mut head[lo * cols..(lo + 1) * cols];
        let hi_row = &mut tail[..cols];
        if a < b {
            (lo_row, hi_row)
        } else {
            (hi_row, lo_row)
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                actual: rhs.rows,
            });
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == T::zero() {
                    continue;
                }
                for (o, &b) in out_row.iter_mut().zip(rhs.row(k)) {
                    *o = *o + a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, x: &[T]) -> Result<Vec<T>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                actual: x.len(),
            });
        }
        Ok((0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(x)
                    .fold(T::zero(), |acc, (&a, &b)| acc + a * b)
            })
            .collect())
    }

    /// Copy of the `rows x cols` block starting at `(r0, c0)`.
    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |r, c| self[(r0 + r, c0 + c)])
    }

    /// `max |self - other|` element-wise; infinite on shape mismatch.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.rows != other.rows || self.cols != other.cols {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| (a - b).modulus())
            .fold(0.0, f64::max)
    }

    /// `max |U^dagger U - I|`, the unitarity defect of a square matrix.
    pub fn unitarity_residual(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let gram = self
            .adjoint()
            .matmul(self)
            .expect("square matrix is conformable with its adjoint");
        gram.max_abs_diff(&Self::identity(self.rows))
    }

    /// Kronecker product `self ⊗ rhs`.
    pub fn kron(&self, rhs: &Self) -> Self {
        Self::from_fn(self.rows * rhs.rows, self.cols * rhs.cols, |r, c| {
            self[(r / rhs.rows, c / rhs.cols)] * rhs[(r % rhs.rows, c % rhs.cols)]
        })
    }
}

impl Matrix<f64> {
    pub fn to_complex(&self) -> Matrix<Complex64> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        }
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.is_square()
            && (0..self.rows).all(|r| (r + 1..self.cols).all(|c| (self[(r, c)] - self[(c, r)]).abs() <= tol))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;

    fn index(&self, (r, c): (usize, usize)) -> &T {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut T {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}

impl<T: fmt::Debug> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", &self.data[r * self.cols..(r + 1) * self.cols])?;
        }
        write!(f, "]")
    }
}

const JACOBI_MAX_SWEEPS: usize = 100;

/// Eigendecomposition `A = P diag(values) P^T` of a real symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    /// Eigenvectors stored as rows, i.e. this is `P^T`.
    pub vectors_t: Matrix<f64>,
    pub sweeps: usize,
}

impl SymmetricEigen {
    /// Eigenvector matrix `P` (eigenvectors as columns).
    pub fn vectors(&self) -> Matrix<f64> {
        self.vectors_t.transpose()
    }
}

fn off_diagonal_norm(a: &Matrix<f64>) -> f64 {
    let n = a.rows();
    let mut sum = 0.0;
    for r in 0..n {
        for c in 0..n {
            if r != c {
                sum += a[(r, c)] * a[(r, c)];
            }
        }
    }
    sum.sqrt()
}

/// Cyclic Jacobi eigensolver for a real symmetric matrix.
///
/// Rotations whose off-diagonal element is negligible against both diagonal
/// entries are replaced by an exact zero, so convergence is detected as an
/// off-diagonal norm at round-off level.
pub fn jacobi_eigen(a: &Matrix<f64>) -> Result<SymmetricEigen> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            expected: a.rows(),
            actual: a.cols(),
        });
    }
    let n = a.rows();
    let mut a = a.clone();
    let mut vt = Matrix::<f64>::identity(n);
    let scale = a.frobenius_norm().max(f64::MIN_POSITIVE);

    for sweep in 0..JACOBI_MAX_SWEEPS {
        let off = off_diagonal_norm(&a);
        if off <= 1e-15 * scale {
            let values = (0..n).map(|i| a[(i, i)]).collect();
            return Ok(SymmetricEigen {
                values,
                vectors_t: vt,
                sweeps: sweep,
            });
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let app = a[(p, p)];
                let aqq = a[(q, q)];
                let g = 100.0 * apq.abs();
                if sweep > 3 && app.abs() + g == app.abs() && aqq.abs() + g == aqq.abs() {
                    a[(p, q)] = 0.0;
                    a[(q, p)] = 0.0;
                    continue;
                }
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                // Rotate rows p and q, then mirror into columns.
                {
                    let (rp, rq) = a.rows_pair_mut(p, q);
                    for (x, y) in rp.iter_mut().zip(rq.iter_mut()) {
                        let (xp, yq) = (*x, *y);
                        *x = c * xp - s * yq;
                        *y = s * xp + c * yq;
                    }
                }
                for k in 0..n {
                    if k != p && k != q {
                        a[(k, p)] = a[(p, k)];
                        a[(k, q)] = a[(q, k)];
                    }
                }
                a[(p, p)] = app - t * apq;
                a[(q, q)] = aqq + t * apq;
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;

                let (vp, vq) = vt.rows_pair_mut(p, q);
                for (x, y) in vp.iter_mut().zip(vq.iter_mut()) {
                    let (xp, yq) = (*x, *y);
                    *x = c * xp - s * yq;
                    *y = s * xp + c * yq;
                }
            }
        }
    }
    Err(Error::EigenNotConverged {
        sweeps: JACOBI_MAX_SWEEPS,
        residual: off_diagonal_norm(&a),
    })
}

/// Full QR factorisation `A = Q R` with `Q` square orthogonal and `diag(R) >= 0`.
#[derive(Debug, Clone)]
pub struct QrDecomposition {
    pub q: Matrix<f64>,
    pub r: Matrix<f64>,
}

/// Householder QR of a tall `m x n` real matrix (`m >= n`).
pub fn householder_qr(a: &Matrix<f64>) -> Result<QrDecomposition> {
    let (m, n) = (a.rows(), a.cols());
    if m < n {
        return Err(Error::InvalidArgument(format!(
            "QR needs rows >= cols, got {m}x{n}"
        )));
    }
    let mut r = a.clone();
    let mut reflectors: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut w = vec![0.0; n.max(m)];

    for j in 0..n {
        let norm = (j..m).map(|i| r[(i, j)] * r[(i, j)]).sum::<f64>().sqrt();
        let mut v: Vec<f64> = (j..m).map(|i| r[(i, j)]).collect();
        if norm == 0.0 {
            reflectors.push(Vec::new());
            continue;
        }
        let alpha = if v[0] >= 0.0 { -norm } else { norm };
        v[0] -= alpha;
        let vnorm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            reflectors.push(Vec::new());
            continue;
        }
        v.iter_mut().for_each(|x| *x /= vnorm);

        // R[j.., j..] -= 2 v (v^T R[j.., j..])
        let w = &mut w[..n];
        w[j..].iter_mut().for_each(|x| *x = 0.0);
        for (vi, i) in v.iter().zip(j..m) {
            for (wc, &rc) in w[j..].iter_mut().zip(&r.row(i)[j..]) {
                *wc += vi * rc;
            }
        }
        for (vi, i) in v.iter().zip(j..m) {
            for (rc, &wc) in r.row_mut(i)[j..].iter_mut().zip(&w[j..]) {
                *rc -= 2.0 * vi * wc;
            }
        }
        for i in j + 1..m {
            r[(i, j)] = 0.0;
        }
        reflectors.push(v);
    }

    // Q = H_0 H_1 ... H_{n-1}, accumulated right-to-left onto the identity.
    let mut q = Matrix::<f64>::identity(m);
    for (j, v) in reflectors.iter().enumerate().rev() {
        if v.is_empty() {
            continue;
        }
        let w = &mut w[..m];
        w.iter_mut().for_each(|x| *x = 0.0);
        for (vi, i) in v.iter().zip(j..m) {
            for (wc, &qc) in w.iter_mut().zip(q.row(i)) {
                *wc += vi * qc;
            }
        }
        for (vi, i) in v.iter().zip(j..m) {
            for (qc, &wc) in q.row_mut(i).iter_mut().zip(w.iter()) {
                *qc -= 2.0 * vi * wc;
            }
        }
    }

    // Fix the sign ambiguity: flip column j of Q and row j of R when R_jj < 0.
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            for c in j..n {
                r[(j, c)] = -r[(j, c)];
            }
            for i in 0..m {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    Ok(QrDecomposition { q, r })
}

//! Block encoding of the partial-summation operator.
//!
//! The unit lower-triangular matrix `Σ` (cumulative sum) is embedded in the
//! Hermitian `H = [[0, Σᵀ], [Σ, 0]]`, which is completed to a unitary
//! `U_H = [[H/η, ·], [B, ·]]` acting on the registers `|b c k>`:
//!
//! 1. `H = P D Pᵀ` by cyclic Jacobi rotations,
//! 2. `B = sqrt(I - D²/η²) Pᵀ`, so that `[H/η; B]` has orthonormal columns,
//! 3. full Householder QR of `W = [H/η; B]` with `diag(R) >= 0`, so the
//!    leading columns of `Q` reproduce `W` and `Q` is the completed unitary.
//!
//! Feeding `|0>_b |0>_c |A>` through `U_H` puts `Σ A / η` on the rows of the
//! `Σ` block of `H`, which sit at `(b, c) = (0, 1)`.

pub mod cache;

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{householder_qr, jacobi_eigen, Matrix};
use crate::state::{Control, Statevector, DATA};
use crate::tol;
use crate::state::Unitary;

/// Register names of the two block-encoding ancillas.
pub const REG_B: &str = "b";
pub const REG_C: &str = "c";

/// Largest k-register width for which the dense construction is allowed.
pub const MAX_K_QUBITS: usize = 8;

/// The `N x N` unit lower-triangular matrix: entry `(r, c)` is 1 iff `r >= c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PartialSumMatrix {
    dim: usize,
}

impl PartialSumMatrix {
    pub fn new(dim: usize) -> Self {
        Self { dim }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, r: usize, c: usize) -> f64 {
        if r >= c {
            1.0
        } else {
            0.0
        }
    }

    pub fn dense(&self) -> Matrix<f64> {
        Matrix::from_fn(self.dim, self.dim, |r, c| self.entry(r, c))
    }

    /// `Σ x`: running sums.
    pub fn apply<T>(&self, x: &[T]) -> Vec<T>
    where
        T: Copy + std::ops::Add<Output = T>,
    {
        let mut out = Vec::with_capacity(x.len());
        let mut acc: Option<T> = None;
        for &v in x {
            let next = acc.map_or(v, |a| a + v);
            out.push(next);
            acc = Some(next);
        }
        out
    }

    /// `Σᵀ x`: running sums from the end.
    pub fn apply_transpose(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; x.len()];
        let mut acc = 0.0;
        for i in (0..x.len()).rev() {
            acc += x[i];
            out[i] = acc;
        }
        out
    }
}

/// The Hermitian embedding `[[0, Σᵀ], [Σ, 0]]`.
pub fn hermitian_embedding(sigma: &PartialSumMatrix) -> Matrix<f64> {
    let n = sigma.dim();
    Matrix::from_fn(2 * n, 2 * n, |r, c| match (r < n, c < n) {
        (true, false) => sigma.entry(c - n, r),
        (false, true) => sigma.entry(r - n, c),
        _ => 0.0,
    })
}

/// Basis pattern on `(a, b, c)` that flags a successful partial sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SuccessPrefix {
    pub ancilla: u8,
    pub b: u8,
    pub c: u8,
}

impl fmt::Display for SuccessPrefix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|{}{}{}>", self.ancilla, self.b, self.c)
    }
}

#[derive(Debug, Clone)]
pub struct BlockEncoding {
    u_h: Matrix<f64>,
    unitary: Unitary,
    eta: f64,
    n_k: usize,
    sigma_row_offset: usize,
    success_prefix: SuccessPrefix,
}

/// Ancilla value on which the partial sum is applied and post-selected:
/// the branch the integral-mode rotation leaves carrying `cos(2πk/N) F_k`.
pub const SUCCESS_ANCILLA_BIT: u8 = 1;

impl BlockEncoding {
    /// `U_H` as a real `4N x 4N` matrix.
    pub fn matrix(&self) -> &Matrix<f64> {
        &self.u_h
    }

    pub fn unitary(&self) -> &Unitary {
        &self.unitary
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn n_k(&self) -> usize {
        self.n_k
    }

    pub fn dim_k(&self) -> usize {
        1 << self.n_k
    }

    pub fn success_prefix(&self) -> SuccessPrefix {
        self.success_prefix
    }

    /// Row offset of the `Σ/η` block inside `U_H`.
    pub fn sigma_row_offset(&self) -> usize {
        self.sigma_row_offset
    }

    /// `max |U_H[0:2N, 0:2N] - H/η|`.
    pub fn block_residual(&self) -> f64 {
        let n2 = 2 * self.dim_k();
        let h = hermitian_embedding(&PartialSumMatrix::new(self.dim_k()));
        let mut worst: f64 = 0.0;
        for r in 0..n2 {
            for c in 0..n2 {
                worst = worst.max((self.u_h[(r, c)] - h[(r, c)] / self.eta).abs());
            }
        }
        worst
    }

    /// Assembles an encoding from a stored `U_H`, re-deriving the layout
    /// facts and checking the encoded block.
    pub(crate) fn from_parts(n_k: usize, eta: f64, u_h: Matrix<f64>) -> Result<Self> {
        let dim = 4usize << n_k;
        if u_h.rows() != dim || u_h.cols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: u_h.rows(),
            });
        }
        let sigma_row_offset = locate_sigma_block(&u_h, 1 << n_k);
        let enc = Self {
            unitary: Unitary::new_unchecked(u_h.to_complex()),
            success_prefix: prefix_from_offset(sigma_row_offset, 1 << n_k),
            u_h,
            eta,
            n_k,
            sigma_row_offset,
        };
        let residual = enc.block_residual();
        if !(residual <= tol::UNITARITY) {
            return Err(Error::NonUnitary { residual });
        }
        Ok(enc)
    }
}

/// Finds which `N`-row block of the top `2N` rows carries column 0 of the
/// encoded operator (the first column of `Σ/η`, all ones over `η`).
fn locate_sigma_block(u_h: &Matrix<f64>, n: usize) -> usize {
    let mass = |block: usize| (0..n).map(|i| u_h[(block * n + i, 0)].powi(2)).sum::<f64>();
    if mass(1) >= mass(0) {
        n
    } else {
        0
    }
}

/// Sub-index layout of `U_H` is `b·2N + c·N + k`.
fn prefix_from_offset(offset: usize, n: usize) -> SuccessPrefix {
    SuccessPrefix {
        ancilla: SUCCESS_ANCILLA_BIT,
        b: ((offset / (2 * n)) & 1) as u8,
        c: ((offset / n) & 1) as u8,
    }
}

/// Builds `U_H` for a k-register of `n_k` qubits (`N = 2^n_k`).
pub fn build_block_encoding(n_k: usize) -> Result<BlockEncoding> {
    if n_k > MAX_K_QUBITS {
        return Err(Error::InvalidArgument(format!(
            "k-register width {n_k} exceeds the dense block-encoding budget of {MAX_K_QUBITS}"
        )));
    }
    let n = 1usize << n_k;
    let h = hermitian_embedding(&PartialSumMatrix::new(n));
    let eig = jacobi_eigen(&h)?;
    let eta = eig.values.iter().fold(0.0f64, |m, d| m.max(d.abs()));

    // B = sqrt(I - D²/η²) Pᵀ; rows of Pᵀ are the eigenvectors.
    let mut b = eig.vectors_t.clone();
    for (i, d) in eig.values.iter().enumerate() {
        let s = (1.0 - (d / eta).powi(2)).clamp(0.0, 1.0).sqrt();
        b.row_mut(i).iter_mut().for_each(|x| *x *= s);
    }
    let w = Matrix::from_fn(4 * n, 2 * n, |r, c| {
        if r < 2 * n {
            h[(r, c)] / eta
        } else {
            b[(r - 2 * n, c)]
        }
    });
    let qr = householder_qr(&w)?;
    let u_h = qr.q;

    let residual = u_h.unitarity_residual();
    if !(residual <= tol::UNITARITY) {
        return Err(Error::NonUnitary { residual });
    }
    BlockEncoding::from_parts(n_k, eta, u_h)
}

/// Applies `U_H` to `|b c k>` on the branch selected by `control`.
///
/// `b` and `c` must be in `|0>`. On the controlled branch the amplitudes on
/// the encoding's success prefix become `Σ A / η`, where `A` is the
/// k-register content before the call.
pub fn apply_partial_sum(state: &mut Statevector, enc: &BlockEncoding, control: Control) -> Result<()> {
    let layout = state.layout();
    let k = layout.register(DATA)?;
    if k.width != enc.n_k() {
        return Err(Error::DimensionMismatch {
            expected: enc.n_k(),
            actual: k.width,
        });
    }
    for name in [REG_B, REG_C] {
        let q = layout.qubit(name)?;
        let residual = state.weight_where(|i| (i >> q) & 1 == 1).sqrt();
        if residual > tol::UNITARITY {
            return Err(Error::RegisterNotZero {
                register: name.to_string(),
                residual,
            });
        }
    }
    let qubits = layout.qubits_of(&[REG_B, REG_C, DATA])?;
    state.apply_register_unitary(enc.unitary(), &qubits, Some(control))
}

/// Amplitudes of `|prefix>|k>` for every `k`, in k order.
pub fn success_amplitudes(state: &Statevector, prefix: SuccessPrefix) -> Result<Vec<Complex64>> {
    let layout = state.layout();
    let base = success_base_index(layout, prefix)?;
    let k = layout.register(DATA)?;
    Ok((0..1usize << k.width)
        .map(|j| state.amplitude(base | (j << k.offset)))
        .collect())
}

/// Basis index of `|prefix>|0>_k`.
pub fn success_base_index(layout: &crate::state::RegisterLayout, prefix: SuccessPrefix) -> Result<usize> {
    let a = layout.qubit(crate::state::ANCILLA)?;
    let b = layout.qubit(REG_B)?;
    let c = layout.qubit(REG_C)?;
    Ok(((prefix.ancilla as usize) << a) | ((prefix.b as usize) << b) | ((prefix.c as usize) << c))
}

const POWER_ITERATION_MAX: usize = 100_000;

/// Largest singular value of the `N x N` partial-sum matrix, by power
/// iteration on `ΣᵀΣ` using running sums (O(N) per step).
pub fn spectral_norm(n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let sigma = PartialSumMatrix::new(n);
    // The leading singular vector of Σ is entrywise positive, so a positive
    // start vector has a component along it.
    let mut v = vec![1.0 / (n as f64).sqrt(); n];
    let mut estimate = 0.0;
    for _ in 0..POWER_ITERATION_MAX {
        let sv = sigma.apply(&v);
        let next = sv.iter().map(|x| x * x).sum::<f64>().sqrt();
        let mut w = sigma.apply_transpose(&sv);
        let wn = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        w.iter_mut().for_each(|x| *x /= wn);
        v = w;
        if (next - estimate).abs() <= 1e-15 * next {
            return next;
        }
        estimate = next;
    }
    estimate
}

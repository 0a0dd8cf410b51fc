//! Statevector simulation of quantum Fourier transform based numerical
//! differentiation (QFTD) and partially bound trapezoidal integration (QFTI).
//!
//! The crate is organised bottom-up:
//!
//! * [`state`]: dense statevector, register layouts, gate application and
//!   shot sampling.
//! * [`circuits`]: register QFT and the ancilla-controlled wavenumber
//!   rotation cascade.
//! * [`psmpo`]: block encoding of the partial-summation matrix.
//! * [`pipelines`]: end-to-end QFTD / QFTI runs with amplitude recovery and
//!   resolution censoring.
//! * [`reference`]: classical stencils, the analytical test-function catalog
//!   and fit metrics.

pub mod circuits;
pub mod error;
pub mod linalg;
pub mod pipelines;
pub mod psmpo;
pub mod reference;
pub mod state;

pub use error::{Error, Result};

/// Numerical tolerances shared across the crate.
pub mod tol {
    /// Allowed drift of the statevector norm from 1.
    pub const STATE_NORM: f64 = 1e-12;
    /// Allowed `max |U^dagger U - I|` for gate payloads.
    pub const UNITARITY: f64 = 1e-10;
    /// Exact-mode probabilities at or below this are treated as unobserved
    /// (amplitude magnitude at the state-norm tolerance).
    pub const EXACT_PROBABILITY_FLOOR: f64 = STATE_NORM * STATE_NORM;
}

pub(crate) fn log2_exact(n: usize) -> Option<u32> {
    (n > 0 && n.is_power_of_two()).then(|| n.trailing_zeros())
}

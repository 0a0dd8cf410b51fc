//! Classical ground truth: the analytical test functions, the periodic
//! stencils the quantum pipelines reproduce exactly, and fit metrics.

pub mod catalog;
pub mod metrics;
pub mod stencils;

pub use catalog::CatalogFunction;
pub use metrics::{loglog_slope, mean_absolute_error, r_squared};
pub use stencils::{central_difference_periodic, dft_derivative, trapezoid_partial_sums};

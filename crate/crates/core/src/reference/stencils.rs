//! Periodic finite-difference and trapezoid stencils, and the direct-DFT
//! spectral derivative with the modified wavenumber `i sin(2πk/N) / Δx`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::log2_exact;

/// `(f_{j+1} - f_{j-1}) / (2Δx)` with wrap-around at both ends.
pub fn central_difference_periodic(samples: &[f64], dx: f64) -> Vec<f64> {
    let n = samples.len();
    (0..n)
        .map(|j| (samples[(j + 1) % n] - samples[(j + n - 1) % n]) / (2.0 * dx))
        .collect()
}

/// `I_j = Δx Σ_{i≤j} (f_{i+1} + f_{i-1}) / 2` with wrap-around indexing.
pub fn trapezoid_partial_sums(samples: &[f64], dx: f64) -> Vec<f64> {
    let n = samples.len();
    let mut acc = 0.0;
    (0..n)
        .map(|i| {
            acc += (samples[(i + 1) % n] + samples[(i + n - 1) % n]) / 2.0;
            dx * acc
        })
        .collect()
}

/// Unnormalised DFT `X_k = Σ_j x_j exp(∓2πi jk/N)` by direct summation.
fn direct_dft(x: &[Complex64], inverse: bool) -> Vec<Complex64> {
    let n = x.len();
    let sign = if inverse { 1.0 } else { -1.0 };
    let twiddle: Vec<Complex64> = (0..n)
        .map(|m| Complex64::from_polar(1.0, sign * 2.0 * PI * m as f64 / n as f64))
        .collect();
    (0..n)
        .map(|k| {
            x.iter()
                .enumerate()
                .map(|(j, v)| v * twiddle[(j * k) % n])
                .sum()
        })
        .collect()
}

/// Complex result of `DFT⁻¹[ i sin(2πk/N)/Δx · DFT[f]_k ]`.
pub fn dft_derivative_complex(samples: &[f64], dx: f64) -> Result<Vec<Complex64>> {
    let n = samples.len();
    log2_exact(n).ok_or(Error::NotPowerOfTwo(n))?;
    let x: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let mut spectrum = direct_dft(&x, false);
    for (k, s) in spectrum.iter_mut().enumerate() {
        let wavenumber = Complex64::new(0.0, (2.0 * PI * k as f64 / n as f64).sin() / dx);
        *s *= wavenumber;
    }
    Ok(direct_dft(&spectrum, true)
        .into_iter()
        .map(|v| v / n as f64)
        .collect())
}

/// Real part of the modified-wavenumber spectral derivative (O(N²)).
pub fn dft_derivative(samples: &[f64], dx: f64) -> Result<Vec<f64>> {
    Ok(dft_derivative_complex(samples, dx)?.into_iter().map(|v| v.re).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn central_difference_by_hand() {
        assert_eq!(
            central_difference_periodic(&[0.0, 1.0, 0.0, -1.0], 1.0),
            vec![1.0, 0.0, -1.0, 0.0]
        );
        assert!(central_difference_periodic(&[3.0; 8], 0.1).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn ramp_wraps_at_boundaries() {
        let ramp: Vec<f64> = (0..8).map(|j| j as f64).collect();
        let d = central_difference_periodic(&ramp, 0.5);
        for v in &d[1..7] {
            assert_eq!(*v, 2.0);
        }
        assert_eq!(d[0], (1.0 - 7.0) / 1.0);
        assert_eq!(d[7], (0.0 - 6.0) / 1.0);
    }

    #[test]
    fn trapezoid_by_hand() {
        assert_eq!(trapezoid_partial_sums(&[1.0, 0.0, 0.0, 0.0], 1.0), vec![0.0, 0.5, 0.5, 1.0]);
        let c = trapezoid_partial_sums(&[2.5; 8], 0.25);
        for (j, v) in c.iter().enumerate() {
            assert!((v - 2.5 * 0.25 * (j + 1) as f64).abs() < 1e-15);
        }
    }

    #[test]
    fn dft_derivative_of_constant_is_zero() {
        let d = dft_derivative(&[1.7; 16], 0.1).unwrap();
        assert!(d.iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn dft_derivative_of_sine_samples() {
        // sin(2πj/N) is an eigenvector: CD gives cos(2πj/N) sin(2π/N) / Δx.
        let n = 32;
        let dx = 0.125;
        let s: Vec<f64> = (0..n).map(|j| (2.0 * PI * j as f64 / n as f64).sin()).collect();
        let d = dft_derivative(&s, dx).unwrap();
        for (j, v) in d.iter().enumerate() {
            let expected = (2.0 * PI * j as f64 / n as f64).cos() * (2.0 * PI / n as f64).sin() / dx;
            assert!((v - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn dft_derivative_rejects_non_power_of_two() {
        assert!(dft_derivative(&[1.0; 6], 1.0).is_err());
    }
}

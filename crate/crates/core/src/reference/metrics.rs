use crate::error::{Error, Result};

fn check_lengths(a: &[f64], b: &[f64], mask: &[bool]) -> Result<()> {
    if a.len() != b.len() || a.len() != mask.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            actual: if a.len() != b.len() { b.len() } else { mask.len() },
        });
    }
    Ok(())
}

/// Coefficient of determination `1 - SS_res / SS_tot` over the masked
/// points, with `SS_tot` taken about the mean of the masked reference.
/// Negative when the fit is worse than that mean.
pub fn r_squared(predicted: &[f64], reference: &[f64], mask: &[bool]) -> Result<f64> {
    check_lengths(predicted, reference, mask)?;
    let pairs: Vec<(f64, f64)> = predicted
        .iter()
        .zip(reference)
        .zip(mask)
        .filter(|(_, &m)| m)
        .map(|((&p, &r), _)| (p, r))
        .collect();
    if pairs.len() < 2 {
        return Err(Error::UndefinedMetric("R² needs at least two masked points"));
    }
    let mean = pairs.iter().map(|(_, r)| r).sum::<f64>() / pairs.len() as f64;
    let ss_tot: f64 = pairs.iter().map(|(_, r)| (r - mean).powi(2)).sum();
    let ss_res: f64 = pairs.iter().map(|(p, r)| (p - r).powi(2)).sum();
    if ss_tot == 0.0 {
        return Err(Error::UndefinedMetric("R² reference has zero variance"));
    }
    Ok(1.0 - ss_res / ss_tot)
}

pub fn mean_absolute_error(a: &[f64], b: &[f64], mask: &[bool]) -> Result<f64> {
    check_lengths(a, b, mask)?;
    let (sum, count) = a
        .iter()
        .zip(b)
        .zip(mask)
        .filter(|(_, &m)| m)
        .fold((0.0, 0usize), |(s, c), ((x, y), _)| (s + (x - y).abs(), c + 1));
    if count == 0 {
        return Err(Error::UndefinedMetric("MAE over an empty mask"));
    }
    Ok(sum / count as f64)
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            actual: y.len(),
        });
    }
    if x.len() < 2 || x.iter().chain(y).any(|v| !(*v > 0.0)) {
        return Err(Error::UndefinedMetric("log-log fit needs two or more positive points"));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    Ok(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn r_squared_reference_values() {
        let all = [true; 3];
        assert_eq!(r_squared(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0], &all).unwrap(), 1.0);
        assert_eq!(r_squared(&[2.0, 2.0, 2.0], &[1.0, 2.0, 3.0], &all).unwrap(), 0.0);
        assert_eq!(r_squared(&[1.0, 2.0, 4.0], &[1.0, 2.0, 3.0], &all).unwrap(), 0.5);
        assert!(r_squared(&[9.0, 9.0, 9.0], &[1.0, 2.0, 3.0], &all).unwrap() < 0.0);
    }

    #[test]
    fn r_squared_respects_mask() {
        let r = r_squared(&[1.0, 2.0, 100.0, 4.0], &[1.0, 2.0, 3.0, 4.0], &[true, true, false, true]).unwrap();
        assert_eq!(r, 1.0);
        assert!(r_squared(&[1.0, 2.0], &[1.0, 2.0], &[true, false]).is_err());
        assert!(r_squared(&[1.0, 2.0], &[3.0, 3.0], &[true, true]).is_err());
    }

    #[test]
    fn mae_values() {
        assert_eq!(mean_absolute_error(&[1.0, 2.0], &[1.0, 2.0], &[true, true]).unwrap(), 0.0);
        assert_eq!(mean_absolute_error(&[0.0, 0.0], &[1.0, 3.0], &[true, true]).unwrap(), 2.0);
        assert!(mean_absolute_error(&[0.0], &[1.0], &[false]).is_err());
        assert!(mean_absolute_error(&[0.0], &[1.0, 2.0], &[true]).is_err());
    }

    #[test]
    fn slope_of_power_law() {
        let x = [8.0, 16.0, 32.0, 64.0];
        let y: Vec<f64> = x.iter().map(|v: &f64| 3.0 * v.powi(-2)).collect();
        assert!((loglog_slope(&x, &y).unwrap() + 2.0).abs() < 1e-12);
        assert!(loglog_slope(&[1.0, 2.0], &[0.0, 1.0]).is_err());
    }

    proptest! {
        #[test]
        fn r_squared_is_scale_invariant(
            pairs in prop::collection::vec((-100.0f64..100.0, -100.0f64..100.0), 3..40),
            c in prop_oneof![-50.0f64..-0.01, 0.01f64..50.0],
        ) {
            let (p, r): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
            let mask = vec![true; p.len()];
            if let Ok(base) = r_squared(&p, &r, &mask) {
                let ps: Vec<f64> = p.iter().map(|v| v * c).collect();
                let rs: Vec<f64> = r.iter().map(|v| v * c).collect();
                let scaled = r_squared(&ps, &rs, &mask).unwrap();
                prop_assert!((scaled - base).abs() <= 1e-9 * base.abs().max(1.0));
            }
        }
    }
}

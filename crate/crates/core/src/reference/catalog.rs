use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::Error;

/// Analytical test functions with exact derivatives and antiderivatives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CatalogFunction {
    /// `cos(2πx)` on `[-2, 2]`.
    Cos2PiX,
    /// `1/x` on `[-1, 1]`, singular at 0.
    InverseX,
    /// `x³ + x² - x` on `[-2, 2]`.
    Cubic,
    /// `cos(πx/2) + sin(3πx/2)` on `[-2, 2]`.
    TwoHarmonic,
}

impl CatalogFunction {
    pub const ALL: [CatalogFunction; 4] = [
        CatalogFunction::Cos2PiX,
        CatalogFunction::InverseX,
        CatalogFunction::Cubic,
        CatalogFunction::TwoHarmonic,
    ];

    pub fn id(&self) -> &'static str {
        match self {
            CatalogFunction::Cos2PiX => "cos-2pi-x",
            CatalogFunction::InverseX => "inv-x",
            CatalogFunction::Cubic => "cubic",
            CatalogFunction::TwoHarmonic => "two-harmonic",
        }
    }

    pub fn formula(&self) -> &'static str {
        match self {
            CatalogFunction::Cos2PiX => "cos(2πx)",
            CatalogFunction::InverseX => "1/x",
            CatalogFunction::Cubic => "x³ + x² - x",
            CatalogFunction::TwoHarmonic => "cos(πx/2) + sin(3πx/2)",
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        match self {
            CatalogFunction::Cos2PiX => (2.0 * PI * x).cos(),
            CatalogFunction::InverseX => 1.0 / x,
            CatalogFunction::Cubic => x * x * x + x * x - x,
            CatalogFunction::TwoHarmonic => (PI * x / 2.0).cos() + (3.0 * PI * x / 2.0).sin(),
        }
    }

    pub fn derivative(&self, x: f64) -> f64 {
        match self {
            CatalogFunction::Cos2PiX => -2.0 * PI * (2.0 * PI * x).sin(),
            CatalogFunction::InverseX => -1.0 / (x * x),
            CatalogFunction::Cubic => 3.0 * x * x + 2.0 * x - 1.0,
            CatalogFunction::TwoHarmonic => {
                -PI / 2.0 * (PI * x / 2.0).sin() + 3.0 * PI / 2.0 * (3.0 * PI * x / 2.0).cos()
            }
        }
    }

    /// An antiderivative. For `1/x` this is `ln|x|`, so integrals that
    /// straddle the singularity are principal values.
    pub fn antiderivative(&self, x: f64) -> f64 {
        match self {
            CatalogFunction::Cos2PiX => (2.0 * PI * x).sin() / (2.0 * PI),
            CatalogFunction::InverseX => x.abs().ln(),
            CatalogFunction::Cubic => x.powi(4) / 4.0 + x.powi(3) / 3.0 - x * x / 2.0,
            CatalogFunction::TwoHarmonic => {
                2.0 / PI * (PI * x / 2.0).sin() - 2.0 / (3.0 * PI) * (3.0 * PI * x / 2.0).cos()
            }
        }
    }

    /// `∫_{x0}^{x} f`.
    pub fn integral_from(&self, x0: f64, x: f64) -> f64 {
        self.antiderivative(x) - self.antiderivative(x0)
    }

    pub fn default_domain(&self) -> (f64, f64) {
        match self {
            CatalogFunction::InverseX => (-1.0, 1.0),
            _ => (-2.0, 2.0),
        }
    }

    /// Singular entries are sampled on cell midpoints so no sample lands on
    /// the pole of a symmetric domain.
    pub fn singular(&self) -> bool {
        matches!(self, CatalogFunction::InverseX)
    }
}

impl fmt::Display for CatalogFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for CatalogFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|f| f.id() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown catalog function `{s}`")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Sixth-order central difference.
    fn fd6(g: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
        (-g(x - 3.0 * h) + 9.0 * g(x - 2.0 * h) - 45.0 * g(x - h) + 45.0 * g(x + h) - 9.0 * g(x + 2.0 * h)
            + g(x + 3.0 * h))
            / (60.0 * h)
    }

    fn probe_points(f: CatalogFunction) -> Vec<f64> {
        let (a, b) = f.default_domain();
        (1..40)
            .map(|i| a + (b - a) * i as f64 / 40.0 + 0.013)
            .filter(|x| !f.singular() || x.abs() > 0.1)
            .collect()
    }

    #[test]
    fn derivatives_match_finite_differences() {
        for f in CatalogFunction::ALL {
            for x in probe_points(f) {
                let fd = fd6(|t| f.value(t), x, 1e-3);
                let exact = f.derivative(x);
                assert!((fd - exact).abs() <= 1e-6 * exact.abs().max(1.0), "{f} at {x}");
            }
        }
    }

    #[test]
    fn antiderivatives_differentiate_back() {
        for f in CatalogFunction::ALL {
            for x in probe_points(f) {
                let fd = fd6(|t| f.antiderivative(t), x, 1e-3);
                let exact = f.value(x);
                assert!((fd - exact).abs() <= 1e-6 * exact.abs().max(1.0), "{f} at {x}");
            }
        }
    }

    #[test]
    fn ids_round_trip() {
        for f in CatalogFunction::ALL {
            assert_eq!(f.id().parse::<CatalogFunction>().unwrap(), f);
        }
        assert!("sinc".parse::<CatalogFunction>().is_err());
    }

    #[test]
    fn integral_from_lower_bound_vanishes() {
        for f in CatalogFunction::ALL {
            let (a, _) = f.default_domain();
            assert_eq!(f.integral_from(a, a), 0.0);
        }
    }
}

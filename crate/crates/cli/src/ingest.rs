use std::path::Path;

use qft_calculus::pipelines::SampledFunction;

use crate::error::{CliError, CliResult};

pub const UNIFORMITY_TOL: f64 = 1e-9;

/// Reads a CSV with columns `x,f`. The grid must be strictly increasing,
/// uniform within [`UNIFORMITY_TOL`] relative, and have a power-of-two
/// number of rows.
pub fn ingest_samples(path: &Path) -> CliResult<SampledFunction> {
    let err = |m: String| CliError::input(path, m);
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| err(e.to_string()))?;
    let headers = reader.headers().map_err(|e| err(e.to_string()))?.clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| err(format!("missing column `{name}`")))
    };
    let (xc, fc) = (column("x")?, column("f")?);

    let mut xs = Vec::new();
    let mut fs = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let line = i + 2;
        let record = record.map_err(|e| err(format!("line {line}: {e}")))?;
        let field = |c: usize, name: &str| -> CliResult<f64> {
            let raw = record.get(c).unwrap_or("");
            let v: f64 = raw
                .parse()
                .map_err(|_| err(format!("line {line}: `{name}` is not a number: `{raw}`")))?;
            if !v.is_finite() {
                return Err(err(format!("line {line}: `{name}` is not finite")));
            }
            Ok(v)
        };
        xs.push(field(xc, "x")?);
        fs.push(field(fc, "f")?);
    }

    let n = xs.len();
    if n < 2 || !n.is_power_of_two() {
        return Err(err(format!("{n} rows; need a power of two, at least 2")));
    }
    let dx = (xs[n - 1] - xs[0]) / (n - 1) as f64;
    if !(dx > 0.0) {
        return Err(err("x must be strictly increasing".into()));
    }
    for i in 1..n {
        let step = xs[i] - xs[i - 1];
        if step <= 0.0 || (step - dx).abs() > UNIFORMITY_TOL * dx {
            return Err(err(format!(
                "line {}: grid is not uniform (step {step:e}, expected {dx:e})",
                i + 2
            )));
        }
    }
    SampledFunction::new(fs, xs[0], dx).map_err(|e| err(e.to_string()))
}

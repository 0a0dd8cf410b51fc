use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use qft_calculus::circuits::Mode;
use qft_calculus::pipelines::{GridKind, Shots};
use qft_calculus::psmpo::MAX_K_QUBITS;
use qft_calculus::reference::CatalogFunction;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const MAX_QFTD_QUBITS: usize = 12;
pub const MIN_QUBITS: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum PipelineKind {
    Qftd,
    Qfti,
}

impl PipelineKind {
    pub fn mode(self) -> Mode {
        match self {
            PipelineKind::Qftd => Mode::Derivative,
            PipelineKind::Qfti => Mode::Integral,
        }
    }
}

impl fmt::Display for PipelineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PipelineKind::Qftd => "qftd",
            PipelineKind::Qfti => "qfti",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum PlotScale {
    #[default]
    Linear,
    Semilog,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum GridArg {
    Left,
    Midpoint,
}

impl From<GridArg> for GridKind {
    fn from(g: GridArg) -> Self {
        match g {
            GridArg::Left => GridKind::Left,
            GridArg::Midpoint => GridKind::Midpoint,
        }
    }
}

/// Shot count or `"exact"`. Serialised as a JSON integer or the string.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ShotsRepr", into = "ShotsRepr")]
pub struct ShotsSpec(pub Shots);

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ShotsRepr {
    Count(u64),
    Text(String),
}

impl TryFrom<ShotsRepr> for ShotsSpec {
    type Error = String;

    fn try_from(r: ShotsRepr) -> Result<Self, String> {
        match r {
            ShotsRepr::Count(m) => Ok(ShotsSpec(Shots::Count(m))),
            ShotsRepr::Text(s) => s.parse(),
        }
    }
}

impl From<ShotsSpec> for ShotsRepr {
    fn from(s: ShotsSpec) -> Self {
        match s.0 {
            Shots::Exact => ShotsRepr::Text("exact".into()),
            Shots::Count(m) => ShotsRepr::Count(m),
        }
    }
}

impl FromStr for ShotsSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s.eq_ignore_ascii_case("exact") {
            return Ok(ShotsSpec(Shots::Exact));
        }
        let cleaned = s.replace('_', "");
        let m = match cleaned.parse::<u64>() {
            Ok(m) => m,
            // Accept 1e7-style counts.
            Err(_) => match cleaned.parse::<f64>() {
                Ok(v) if v >= 1.0 && v.fract() == 0.0 && v <= u64::MAX as f64 => v as u64,
                _ => return Err(format!("expected a shot count or `exact`, got `{s}`")),
            },
        };
        Ok(ShotsSpec(Shots::Count(m)))
    }
}

impl fmt::Display for ShotsSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// A catalog entry or a CSV file of `x,f` samples.
#[derive(Debug, Clone, PartialEq)]
pub enum FunctionSource {
    Catalog(CatalogFunction),
    File(PathBuf),
}

impl FunctionSource {
    pub fn parse(s: &str) -> Self {
        match s.parse::<CatalogFunction>() {
            Ok(f) => FunctionSource::Catalog(f),
            Err(_) => FunctionSource::File(PathBuf::from(s)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub mode: PipelineKind,
    /// Catalog id or path to a sample CSV.
    pub function: String,
    pub n_qubits: usize,
    /// Defaults to the catalog function's domain. Ignored for CSV input.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<[f64; 2]>,
    pub shots: ShotsSpec,
    #[serde(default)]
    pub seed: u64,
    /// Output directory for `result.csv` and `metrics.json`.
    pub output: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plot: Option<PathBuf>,
    #[serde(default)]
    pub scale: PlotScale,
    /// Defaults to midpoints for singular catalog entries, left points otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridArg>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            mode: PipelineKind::Qftd,
            function: CatalogFunction::Cos2PiX.id().to_string(),
            n_qubits: 8,
            domain: None,
            shots: ShotsSpec(Shots::Exact),
            seed: 0,
            output: PathBuf::from("out"),
            plot: None,
            scale: PlotScale::Linear,
            grid: None,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json_file(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::input(path, e.to_string()))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> CliResult<Self> {
        serde_json::from_str(text).map_err(|e| CliError::config("config", e.to_string()))
    }

    pub fn source(&self) -> FunctionSource {
        FunctionSource::parse(&self.function)
    }

    pub fn grid_kind(&self) -> GridKind {
        match (self.grid, self.source()) {
            (Some(g), _) => g.into(),
            (None, FunctionSource::Catalog(f)) if f.singular() => GridKind::Midpoint,
            _ => GridKind::Left,
        }
    }

    /// Explicit domain, else the catalog default.
    pub fn effective_domain(&self) -> Option<(f64, f64)> {
        match (self.domain, self.source()) {
            (Some([a, b]), _) => Some((a, b)),
            (None, FunctionSource::Catalog(f)) => Some(f.default_domain()),
            (None, FunctionSource::File(_)) => None,
        }
    }

    pub fn validate(&self) -> CliResult<()> {
        let max = match self.mode {
            PipelineKind::Qftd => MAX_QFTD_QUBITS,
            PipelineKind::Qfti => MAX_K_QUBITS,
        };
        if self.n_qubits < MIN_QUBITS || self.n_qubits > max {
            return Err(CliError::config(
                "n_qubits",
                format!("{} mode supports {MIN_QUBITS}..={max} qubits, got {}", self.mode, self.n_qubits),
            ));
        }
        if let Some([a, b]) = self.domain {
            if !(a.is_finite() && b.is_finite() && a < b) {
                return Err(CliError::config("domain", format!("need min < max, got [{a}, {b}]")));
            }
        }
        if self.shots.0 == Shots::Count(0) {
            return Err(CliError::config("shots", "must be at least 1"));
        }
        if self.function.is_empty() {
            return Err(CliError::config("function", "empty"));
        }
        if let FunctionSource::Catalog(f) = self.source() {
            let (a, b) = self.effective_domain().unwrap_or(f.default_domain());
            if f.singular() && self.grid_kind() == GridKind::Left {
                let dx = (b - a) / (1u64 << self.n_qubits) as f64;
                let hits_pole = (0..1u64 << self.n_qubits).any(|j| a + j as f64 * dx == 0.0);
                if hits_pole {
                    return Err(CliError::config("grid", format!("{f} would be sampled at its pole")));
                }
            }
        }
        if self.output.as_os_str().is_empty() {
            return Err(CliError::config("output", "empty path"));
        }
        Ok(())
    }
}

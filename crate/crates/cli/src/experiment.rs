use std::path::{Path, PathBuf};
use std::sync::{Arc, OnceLock};

use qft_calculus::circuits::{angle_schedule, Mode, WavenumberSchedule};
use qft_calculus::pipelines::{
    analytical_sq, expected_coverage, qftd_run_with_schedule, qfti_run_with_schedule, resolution, RecoveredSeries,
    SampledFunction, Shots,
};
use qft_calculus::psmpo::cache::BlockEncodingCache;
use qft_calculus::psmpo::BlockEncoding;
use qft_calculus::reference::{
    central_difference_periodic, mean_absolute_error, r_squared, trapezoid_partial_sums,
};
use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, FunctionSource, PipelineKind};
use crate::error::{CliError, CliResult};
use crate::ingest::ingest_samples;
use crate::plot::emit_plot;

pub const RESULT_FILE: &str = "result.csv";
pub const METRICS_FILE: &str = "metrics.json";
/// Directory for on-disk block encodings; unset keeps them in memory only.
pub const CACHE_DIR_ENV: &str = "QFTCALC_CACHE_DIR";

/// Process-wide block-encoding cache.
pub fn encodings() -> &'static BlockEncodingCache {
    static CACHE: OnceLock<BlockEncodingCache> = OnceLock::new();
    CACHE.get_or_init(|| match std::env::var_os(CACHE_DIR_ENV) {
        Some(dir) if !dir.is_empty() => BlockEncodingCache::with_dir(PathBuf::from(dir)),
        _ => BlockEncodingCache::in_memory(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub r_squared: Option<f64>,
    pub mae: Option<f64>,
    pub epsilon: f64,
    pub coverage_expected: f64,
    pub coverage_observed: f64,
    pub success_probability: f64,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub config: ExperimentConfig,
    pub sampled: SampledFunction,
    pub series: RecoveredSeries,
    pub analytical_sq: Vec<f64>,
    pub metrics: Metrics,
}

pub fn load_samples(cfg: &ExperimentConfig) -> CliResult<SampledFunction> {
    match cfg.source() {
        FunctionSource::Catalog(f) => {
            let domain = cfg.effective_domain().unwrap_or(f.default_domain());
            Ok(SampledFunction::from_catalog(f, domain, cfg.n_qubits, cfg.grid_kind())?)
        }
        FunctionSource::File(path) => {
            let s = ingest_samples(&path)?;
            if s.n_qubits() != cfg.n_qubits {
                return Err(CliError::config(
                    "n_qubits",
                    format!("{} holds {} samples, not 2^{}", path.display(), s.len(), cfg.n_qubits),
                ));
            }
            Ok(s)
        }
    }
}

/// Squared reference values: analytical for catalog functions, the
/// classical stencil for sampled input.
pub fn reference_sq(cfg: &ExperimentConfig, sampled: &SampledFunction) -> Vec<f64> {
    let mode = cfg.mode.mode();
    match cfg.source() {
        FunctionSource::Catalog(f) => analytical_sq(f, sampled, mode),
        FunctionSource::File(_) => {
            let values = match mode {
                Mode::Derivative => central_difference_periodic(sampled.samples(), sampled.dx()),
                Mode::Integral => trapezoid_partial_sums(sampled.samples(), sampled.dx()),
            };
            values.into_iter().map(|v| v * v).collect()
        }
    }
}

/// Runs the configured pipeline without touching the filesystem beyond
/// reading CSV input.
pub fn execute(cfg: &ExperimentConfig) -> CliResult<Outcome> {
    let schedule = angle_schedule(cfg.n_qubits, cfg.mode.mode())?;
    execute_with_schedule(cfg, &schedule)
}

pub fn execute_with_schedule(cfg: &ExperimentConfig, schedule: &WavenumberSchedule) -> CliResult<Outcome> {
    cfg.validate()?;
    let sampled = load_samples(cfg)?;
    let shots = cfg.shots.0;
    let (series, eta) = match cfg.mode {
        PipelineKind::Qftd => (qftd_run_with_schedule(&sampled, shots, cfg.seed, schedule)?, None),
        PipelineKind::Qfti => {
            let enc: Arc<BlockEncoding> = encodings().get(cfg.n_qubits)?;
            let series = qfti_run_with_schedule(&sampled, &enc, shots, cfg.seed, schedule)?;
            (series, Some(enc.eta()))
        }
    };
    let reference = reference_sq(cfg, &sampled);
    let metrics = compute_metrics(&sampled, &series, &reference, eta)?;
    Ok(Outcome {
        config: cfg.clone(),
        sampled,
        series,
        analytical_sq: reference,
        metrics,
    })
}

/// Metrics of a recovered series against its squared reference.
///
/// R² uses the series' fit mask; MAE compares magnitudes over every point,
/// with censored points counting as zero.
pub fn compute_metrics(
    sampled: &SampledFunction,
    series: &RecoveredSeries,
    reference: &[f64],
    eta: Option<f64>,
) -> CliResult<Metrics> {
    let mut warnings = Vec::new();
    let epsilon = match series.shots_used {
        Shots::Count(m) => resolution(sampled, m, series.mode, eta)?,
        Shots::Exact => series.resolution_epsilon,
    };
    let values = series.values_sq();
    let r_squared = match r_squared(&values, reference, &series.fit_mask()) {
        Ok(r) => Some(r),
        Err(e) => {
            warnings.push(format!("r_squared undefined: {e}"));
            None
        }
    };
    let magnitude = |v: &[f64]| v.iter().map(|x| x.sqrt()).collect::<Vec<_>>();
    let mae = mean_absolute_error(&magnitude(&values), &magnitude(reference), &vec![true; values.len()]).ok();
    if series.points.iter().all(|p| !p.retained) {
        warnings.push("no retained points".to_string());
    }
    Ok(Metrics {
        r_squared,
        mae,
        epsilon,
        coverage_expected: expected_coverage(reference, epsilon),
        coverage_observed: series.coverage(),
        success_probability: series.success_probability,
        warnings,
    })
}

pub fn result_csv(outcome: &Outcome) -> CliResult<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["x", "quantum_sq", "analytical_sq", "retained"])
        .map_err(std::io::Error::from)?;
    for (p, a) in outcome.series.points.iter().zip(&outcome.analytical_sq) {
        w.write_record([
            format!("{:.16e}", p.x),
            format!("{:.16e}", p.value_sq),
            format!("{:.16e}", a),
            p.retained.to_string(),
        ])
        .map_err(std::io::Error::from)?;
    }
    w.into_inner().map_err(|e| CliError::Io(e.into_error()))
}

pub fn metrics_json(metrics: &Metrics) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(metrics).expect("metrics serialise");
    out.push(b'\n');
    out
}

/// Writes via a temporary file in the target directory, then renames.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    use std::io::Write;
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// Writes `result.csv`, `metrics.json` and the optional plot.
pub fn write_outputs(outcome: &mut Outcome) -> CliResult<()> {
    let dir = &outcome.config.output;
    if let Some(plot) = outcome.config.plot.clone() {
        let warnings = emit_plot(&outcome.series, &outcome.analytical_sq, &plot, outcome.config.scale)?;
        outcome.metrics.warnings.extend(warnings);
    }
    atomic_write(&dir.join(RESULT_FILE), &result_csv(outcome)?)?;
    atomic_write(&dir.join(METRICS_FILE), &metrics_json(&outcome.metrics))?;
    Ok(())
}

pub fn run_experiment(cfg: &ExperimentConfig) -> CliResult<Outcome> {
    let mut outcome = execute(cfg)?;
    write_outputs(&mut outcome)?;
    Ok(outcome)
}

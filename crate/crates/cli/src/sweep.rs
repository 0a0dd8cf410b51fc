//! Independent experiments run in parallel, with an error-trend summary.

use std::path::Path;

use qft_calculus::pipelines::Shots;
use qft_calculus::reference::loglog_slope;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, PipelineKind, ShotsSpec};
use crate::error::{CliError, CliResult};
use crate::experiment::{atomic_write, execute, write_outputs, Outcome};
use crate::presets::Preset;

pub const SUMMARY_FILE: &str = "summary.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepEntry {
    pub output: String,
    pub mode: PipelineKind,
    pub function: String,
    pub n_qubits: usize,
    pub shots: ShotsSpec,
    pub seed: u64,
    pub r_squared: Option<f64>,
    pub mae: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub runs: Vec<SweepEntry>,
    /// Slope of log(MAE) against log(N), when every run shares one mode and
    /// function and at least two qubit counts succeeded.
    pub mae_slope: Option<f64>,
}

/// One config per qubit count of the preset's sweep range, written to
/// `dir/n{n}`, with seeds `seed, seed + 1, ...`.
pub fn expand_preset(preset: &Preset, dir: &Path, seed: u64, shots: Option<Shots>) -> Vec<ExperimentConfig> {
    let range = preset.sweep.clone().unwrap_or(preset.n_qubits..=preset.n_qubits);
    range
        .enumerate()
        .map(|(i, n)| {
            let mut cfg = preset.config(dir.join(format!("n{n}")), seed + i as u64);
            cfg.n_qubits = n;
            if let Some(s) = shots {
                cfg.shots = ShotsSpec(s);
            }
            cfg
        })
        .collect()
}

/// Runs every config in parallel. Outputs are written when `write` is set.
pub fn run_sweep(configs: &[ExperimentConfig], write: bool) -> Vec<CliResult<Outcome>> {
    configs
        .par_iter()
        .map(|cfg| {
            let mut outcome = execute(cfg)?;
            if write {
                write_outputs(&mut outcome)?;
            }
            Ok(outcome)
        })
        .collect()
}

pub fn summarize(configs: &[ExperimentConfig], results: &[CliResult<Outcome>]) -> SweepSummary {
    let runs: Vec<SweepEntry> = configs
        .iter()
        .zip(results)
        .map(|(cfg, r)| SweepEntry {
            output: cfg.output.display().to_string(),
            mode: cfg.mode,
            function: cfg.function.clone(),
            n_qubits: cfg.n_qubits,
            shots: cfg.shots,
            seed: cfg.seed,
            r_squared: r.as_ref().ok().and_then(|o| o.metrics.r_squared),
            mae: r.as_ref().ok().and_then(|o| o.metrics.mae),
            error: r.as_ref().err().map(|e| e.to_string()),
        })
        .collect();
    let homogeneous = runs
        .windows(2)
        .all(|w| w[0].mode == w[1].mode && w[0].function == w[1].function);
    let (ns, maes): (Vec<f64>, Vec<f64>) = runs
        .iter()
        .filter_map(|r| r.mae.filter(|m| *m > 0.0).map(|m| ((1u64 << r.n_qubits) as f64, m)))
        .unzip();
    let mae_slope = if homogeneous { loglog_slope(&ns, &maes).ok() } else { None };
    SweepSummary { runs, mae_slope }
}

pub fn write_summary(dir: &Path, summary: &SweepSummary) -> CliResult<()> {
    let mut bytes = serde_json::to_vec_pretty(summary).map_err(|e| CliError::Validation(e.to_string()))?;
    bytes.push(b'\n');
    atomic_write(&dir.join(SUMMARY_FILE), &bytes)?;
    Ok(())
}

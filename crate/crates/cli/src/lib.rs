//! Experiment runner for the `qft-calculus` simulator: configuration,
//! figure presets, CSV ingestion, result and metrics files, SVG plots,
//! parallel sweeps and the validation suite.

pub mod config;
pub mod error;
pub mod experiment;
pub mod ingest;
pub mod plot;
pub mod presets;
pub mod sweep;
pub mod validate;

pub use config::ExperimentConfig;
pub use error::{CliError, CliResult};
pub use experiment::{execute, run_experiment, Metrics, Outcome};

//! Named configurations for the published figures.

use std::ops::RangeInclusive;

use qft_calculus::pipelines::Shots;

use crate::config::{ExperimentConfig, GridArg, PipelineKind, PlotScale, ShotsSpec};

#[derive(Debug, Clone, PartialEq)]
pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    pub mode: PipelineKind,
    pub function: &'static str,
    pub n_qubits: usize,
    pub domain: [f64; 2],
    pub shots: u64,
    pub grid: Option<GridArg>,
    pub scale: PlotScale,
    /// Qubit counts covered by `sweep --preset`.
    pub sweep: Option<RangeInclusive<usize>>,
}

impl Preset {
    pub fn config(&self, output: impl Into<std::path::PathBuf>, seed: u64) -> ExperimentConfig {
        ExperimentConfig {
            mode: self.mode,
            function: self.function.to_string(),
            n_qubits: self.n_qubits,
            domain: Some(self.domain),
            shots: ShotsSpec(Shots::Count(self.shots)),
            seed,
            output: output.into(),
            plot: None,
            scale: self.scale,
            grid: self.grid,
        }
    }
}

const fn preset(
    name: &'static str,
    description: &'static str,
    mode: PipelineKind,
    function: &'static str,
    n_qubits: usize,
    domain: [f64; 2],
    shots: u64,
) -> Preset {
    Preset {
        name,
        description,
        mode,
        function,
        n_qubits,
        domain,
        shots,
        grid: None,
        scale: PlotScale::Linear,
        sweep: None,
    }
}

pub fn all() -> Vec<Preset> {
    use PipelineKind::{Qftd, Qfti};
    vec![
        preset("fig4", "QFTD of cos(2πx)", Qftd, "cos-2pi-x", 8, [-2.0, 2.0], 10_000_000),
        Preset {
            grid: Some(GridArg::Midpoint),
            scale: PlotScale::Semilog,
            ..preset("fig5", "QFTD of 1/x across the pole", Qftd, "inv-x", 8, [-1.0, 1.0], 10_000_000)
        },
        Preset {
            grid: Some(GridArg::Midpoint),
            scale: PlotScale::Semilog,
            ..preset("fig6", "QFTD of 1/x on a shifted domain", Qftd, "inv-x", 8, [0.2, 1.0], 100_000_000)
        },
        preset("fig7a", "QFTD of x³ + x² - x", Qftd, "cubic", 8, [-2.0, 2.0], 10_000_000),
        preset("fig7b", "QFTD of cos(πx/2) + sin(3πx/2)", Qftd, "two-harmonic", 8, [-2.0, 2.0], 10_000_000),
        Preset {
            sweep: Some(3..=8),
            ..preset("fig9a", "QFTD error trend for cos(2πx)", Qftd, "cos-2pi-x", 8, [-2.0, 2.0], 100_000_000)
        },
        Preset {
            sweep: Some(3..=8),
            ..preset("fig9b", "QFTI error trend for cos(2πx)", Qfti, "cos-2pi-x", 6, [-1.0, 1.0], 10_000_000)
        },
        preset("fig10", "QFTI of cos(2πx)", Qfti, "cos-2pi-x", 6, [-2.0, 2.0], 10_000_000),
        Preset {
            grid: Some(GridArg::Midpoint),
            ..preset("fig11", "QFTI of 1/x across the pole", Qfti, "inv-x", 6, [-1.0, 1.0], 10_000_000)
        },
        preset("fig12a", "QFTI of x³ + x² - x", Qfti, "cubic", 6, [-2.0, 2.0], 10_000_000),
        preset("fig12b", "QFTI of cos(πx/2) + sin(3πx/2)", Qfti, "two-harmonic", 6, [-2.0, 2.0], 10_000_000),
    ]
}

pub fn find(name: &str) -> Option<Preset> {
    all().into_iter().find(|p| p.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_validate() {
        for p in all() {
            p.config("out", 1).validate().unwrap();
        }
    }

    #[test]
    fn names_are_unique() {
        let mut names: Vec<_> = all().iter().map(|p| p.name).collect();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), all().len());
    }

    #[test]
    fn fig6_parameters() {
        let p = find("fig6").unwrap();
        assert_eq!(p.domain, [0.2, 1.0]);
        assert_eq!(p.shots, 100_000_000);
        assert_eq!(p.n_qubits, 8);
        assert!(find("fig8").is_none());
    }
}

//! Self-checks: exact-mode oracle equivalences, operator validity and
//! statistical soundness (fast), plus sampled figure reproductions and
//! error-order regressions (full).

use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64;
use qft_calculus::circuits::{angle_schedule, qft, wavenumber_rotation, Mode, WavenumberSchedule};
use qft_calculus::pipelines::{
    expected_coverage, qftd_run_with_schedule, qftd_state, qfti_run_with_schedule, resolution, GridKind,
    SampledFunction, Shots,
};
use qft_calculus::psmpo::build_block_encoding;
use qft_calculus::reference::{
    central_difference_periodic, loglog_slope, trapezoid_partial_sums, CatalogFunction,
};
use qft_calculus::state::{amplitude_encode, GateOp, RegisterLayout, SingleQubitGate, Statevector, ANCILLA, DATA};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::config::{ExperimentConfig, PipelineKind, ShotsSpec};
use crate::experiment::{execute, run_experiment, Outcome, METRICS_FILE, RESULT_FILE};
use crate::presets;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Fast,
    Full,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ValidateOptions {
    /// Doubles the first rotation angle of every schedule, to confirm the
    /// suite notices a broken circuit.
    pub tamper_schedule: bool,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl std::fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} {} ({:.2}s): {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.seconds,
            self.detail
        )
    }
}

type Check = Result<String, String>;

fn timed(name: &'static str, f: impl FnOnce() -> Check) -> CheckOutcome {
    let start = Instant::now();
    let result = f();
    let seconds = start.elapsed().as_secs_f64();
    match result {
        Ok(detail) => CheckOutcome {
            name,
            passed: true,
            detail,
            seconds,
        },
        Err(detail) => CheckOutcome {
            name,
            passed: false,
            detail,
            seconds,
        },
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn schedule(n: usize, mode: Mode, opts: &ValidateOptions) -> Result<WavenumberSchedule, String> {
    let s = angle_schedule(n, mode).map_err(|e| e.to_string())?;
    Ok(if opts.tamper_schedule {
        let doubled = s.rotation(0).scaled(2);
        s.with_angle(0, doubled)
    } else {
        s
    })
}

fn catalog_sample(f: CatalogFunction, n: usize) -> Result<SampledFunction, String> {
    let grid = if f.singular() { GridKind::Midpoint } else { GridKind::Left };
    SampledFunction::from_catalog(f, f.default_domain(), n, grid).map_err(|e| e.to_string())
}

/// Exact QFTD equals the squared periodic central difference for every
/// catalog function, n = 3..=8, within 1e-9 of `|f|²/Δx²`.
pub fn check_qftd_oracle(opts: &ValidateOptions) -> CheckOutcome {
    timed("qftd-oracle", || {
        let mut worst: f64 = 0.0;
        for f in CatalogFunction::ALL {
            for n in 3..=8 {
                let s = catalog_sample(f, n)?;
                let run = qftd_run_with_schedule(&s, Shots::Exact, 0, &schedule(n, Mode::Derivative, opts)?)
                    .map_err(|e| e.to_string())?;
                let scale = (s.l2_norm() / s.dx()).powi(2);
                let oracle = central_difference_periodic(s.samples(), s.dx());
                for (p, o) in run.points.iter().zip(&oracle) {
                    let dev = (p.value_sq - o * o).abs() / scale;
                    worst = worst.max(dev);
                    ensure(dev <= 1e-9, || format!("{f} n={n} x={}: relative deviation {dev:.3e}", p.x))?;
                }
            }
        }
        Ok(format!("4 functions x n=3..8, worst relative deviation {worst:.2e}"))
    })
}

/// Exact QFTI equals the squared cumulative overlapping trapezoid for every
/// catalog function, n = 3..=6, within 1e-9.
pub fn check_qfti_oracle(opts: &ValidateOptions) -> CheckOutcome {
    timed("qfti-oracle", || {
        let mut worst: f64 = 0.0;
        for n in 3..=6 {
            let enc = crate::experiment::encodings().get(n).map_err(|e| e.to_string())?;
            for f in CatalogFunction::ALL {
                let s = catalog_sample(f, n)?;
                let run = qfti_run_with_schedule(&s, &enc, Shots::Exact, 0, &schedule(n, Mode::Integral, opts)?)
                    .map_err(|e| e.to_string())?;
                let oracle = trapezoid_partial_sums(s.samples(), s.dx());
                let scale = oracle.iter().fold(1.0f64, |m, v| m.max(v * v));
                for (p, o) in run.points.iter().zip(&oracle) {
                    let dev = (p.value_sq - o * o).abs() / scale;
                    worst = worst.max(dev);
                    ensure(dev <= 1e-9, || format!("{f} n={n} x={}: relative deviation {dev:.3e}", p.x))?;
                }
            }
        }
        Ok(format!("4 functions x n=3..6, worst relative deviation {worst:.2e}"))
    })
}

/// `U_H` is orthogonal and carries `H/η` in its leading block for N = 2..64.
pub fn check_block_encodings() -> CheckOutcome {
    timed("block-encoding", || {
        let mut lines = Vec::new();
        for n_k in 1..=6 {
            let enc = build_block_encoding(n_k).map_err(|e| e.to_string())?;
            let unitarity = enc.matrix().unitarity_residual();
            let block = enc.block_residual();
            ensure(unitarity <= 1e-10 && block <= 1e-10, || {
                format!("N={}: unitarity {unitarity:.2e}, block {block:.2e}", 1 << n_k)
            })?;
            lines.push(format!("N={} η={:.4}", 1 << n_k, enc.eta()));
        }
        Ok(lines.join(", "))
    })
}

/// The register QFT equals the DFT matrix `exp(-2πi jk/N)/√N` for n ≤ 5.
pub fn check_qft_dft() -> CheckOutcome {
    timed("qft-dft", || {
        let mut worst: f64 = 0.0;
        for n in 1..=5 {
            let dim = 1usize << n;
            let layout = RegisterLayout::single(DATA, n).map_err(|e| e.to_string())?;
            for j in 0..dim {
                for inverse in [false, true] {
                    let mut s = Statevector::basis(layout.clone(), j).map_err(|e| e.to_string())?;
                    qft(&mut s, DATA, inverse, None).map_err(|e| e.to_string())?;
                    let sign = if inverse { 1.0 } else { -1.0 };
                    for k in 0..dim {
                        let expected = Complex64::from_polar(
                            1.0 / (dim as f64).sqrt(),
                            sign * 2.0 * PI * (j * k % dim) as f64 / dim as f64,
                        );
                        worst = worst.max((s.amplitude(k) - expected).norm());
                    }
                }
            }
        }
        ensure(worst <= 1e-12, || format!("max deviation {worst:.3e}"))?;
        Ok(format!("n=1..5 forward and inverse, max deviation {worst:.2e}"))
    })
}

/// After the rotation each wavenumber keeps its weight across the two
/// ancilla branches, and the success branch carries `|sin|` or `|cos|`
/// of `2πk/N` times `|F_k|`.
pub fn check_wavenumber_branches(opts: &ValidateOptions) -> CheckOutcome {
    timed("wavenumber-branches", || {
        let mut worst: f64 = 0.0;
        for n in 1..=6 {
            let dim = 1usize << n;
            let samples: Vec<f64> = (0..dim)
                .map(|j| CatalogFunction::TwoHarmonic.value(-2.0 + 4.0 * j as f64 / dim as f64) + 0.3)
                .collect();
            for mode in [Mode::Derivative, Mode::Integral] {
                let sched = schedule(n, mode, opts)?;
                let layout = RegisterLayout::new(&[(ANCILLA, 1), (DATA, n)]).map_err(|e| e.to_string())?;
                let (mut s, _) = amplitude_encode(&samples, layout).map_err(|e| e.to_string())?;
                let a = s.layout().qubit(ANCILLA).map_err(|e| e.to_string())?;
                if sched.ancilla_init() == 1 {
                    s.apply_gate(&GateOp::Single {
                        target: a,
                        gate: SingleQubitGate::x(),
                    })
                    .map_err(|e| e.to_string())?;
                }
                qft(&mut s, DATA, false, None).map_err(|e| e.to_string())?;
                let init = (sched.ancilla_init() as usize) << a;
                let spectrum: Vec<Complex64> = (0..dim).map(|k| s.amplitude(init | k)).collect();
                wavenumber_rotation(&mut s, &sched).map_err(|e| e.to_string())?;
                let success = (sched.success_bit() as usize) << a;
                let other = (1 - sched.success_bit() as usize) << a;
                for (k, f_k) in spectrum.iter().enumerate() {
                    let total = s.amplitude(success | k).norm_sqr() + s.amplitude(other | k).norm_sqr();
                    let completeness = (total - f_k.norm_sqr()).abs();
                    let angle = 2.0 * PI * k as f64 / dim as f64;
                    let trig = match mode {
                        Mode::Derivative => angle.sin(),
                        Mode::Integral => angle.cos(),
                    };
                    let law = (s.amplitude(success | k).norm() - trig.abs() * f_k.norm()).abs();
                    worst = worst.max(completeness).max(law);
                    ensure(completeness <= 1e-12, || {
                        format!("{mode} n={n} k={k}: branch weight off by {completeness:.3e}")
                    })?;
                    ensure(law <= 1e-12, || {
                        format!("{mode} n={n} k={k}: success amplitude off by {law:.3e}")
                    })?;
                }
            }
        }
        Ok(format!("n=1..6 both modes, max deviation {worst:.2e}"))
    })
}

/// Pearson χ² of 10^6 shots against exact probabilities, bins with expected
/// count below 5 pooled, at significance 1e-6.
pub fn check_sampling_chi_square(opts: &ValidateOptions) -> CheckOutcome {
    timed("sampling-chi-square", || {
        let shots = 1_000_000u64;
        let mut lines = Vec::new();
        for (i, f) in CatalogFunction::ALL.into_iter().enumerate() {
            let s = catalog_sample(f, 6)?;
            let state = qftd_state(&s, &angle_schedule(6, Mode::Derivative).map_err(|e| e.to_string())?)
                .map_err(|e| e.to_string())?;
            let probs = state.exact_probabilities();
            let hist = state.sample(shots, opts.seed + i as u64).map_err(|e| e.to_string())?;
            let m = shots as f64;
            let (mut stat, mut bins, mut pooled_e, mut pooled_o) = (0.0, 0usize, 0.0, 0.0);
            for (idx, &p) in probs.iter().enumerate() {
                let (e, o) = (p * m, hist.count(idx) as f64);
                if e >= 5.0 {
                    stat += (o - e).powi(2) / e;
                    bins += 1;
                } else {
                    pooled_e += e;
                    pooled_o += o;
                }
            }
            if pooled_e >= 5.0 {
                stat += (pooled_o - pooled_e).powi(2) / pooled_e;
                bins += 1;
            }
            ensure(bins >= 2, || format!("{f}: too few bins"))?;
            let critical = ChiSquared::new((bins - 1) as f64)
                .map_err(|e| e.to_string())?
                .inverse_cdf(1.0 - 1e-6);
            ensure(stat < critical, || format!("{f}: χ² = {stat:.1} ≥ {critical:.1} ({bins} bins)"))?;
            lines.push(format!("{f} χ²={stat:.1}/{critical:.1}"));
        }
        Ok(lines.join(", "))
    })
}

/// Identical config and seed give byte-identical result and metrics files.
pub fn check_reproducibility(opts: &ValidateOptions) -> CheckOutcome {
    timed("reproducibility", || {
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        for (mode, n) in [(PipelineKind::Qftd, 7), (PipelineKind::Qfti, 5)] {
            let read_pair = |tag: &str| -> Result<(Vec<u8>, Vec<u8>), String> {
                let cfg = ExperimentConfig {
                    mode,
                    function: "two-harmonic".into(),
                    n_qubits: n,
                    shots: ShotsSpec(Shots::Count(200_000)),
                    seed: opts.seed,
                    output: dir.path().join(format!("{mode}-{tag}")),
                    ..Default::default()
                };
                run_experiment(&cfg).map_err(|e| e.to_string())?;
                let read = |f: &str| std::fs::read(cfg.output.join(f)).map_err(|e| e.to_string());
                Ok((read(RESULT_FILE)?, read(METRICS_FILE)?))
            };
            let first = read_pair("a")?;
            let second = read_pair("b")?;
            ensure(first == second, || format!("{mode}: outputs differ between identical runs"))?;
        }
        Ok("qftd and qfti outputs byte-identical across repeated runs".into())
    })
}

fn run_preset(name: &str, seed: u64) -> Result<Outcome, String> {
    let preset = presets::find(name).ok_or_else(|| format!("unknown preset {name}"))?;
    execute(&preset.config("unused", seed)).map_err(|e| e.to_string())
}

fn r2_of(o: &Outcome) -> Result<f64, String> {
    o.metrics
        .r_squared
        .ok_or_else(|| format!("R² undefined: {:?}", o.metrics.warnings))
}

/// fig4 preset reaches R² ≥ 0.95.
pub fn check_fig4(opts: &ValidateOptions) -> CheckOutcome {
    timed("fig4-r2", || {
        let r2 = r2_of(&run_preset("fig4", opts.seed)?)?;
        ensure(r2 >= 0.95, || format!("R² = {r2:.4} < 0.95"))?;
        Ok(format!("R² = {r2:.4} (published 0.982)"))
    })
}

/// fig6 preset reaches R² ≥ 0.98 with observed coverage within 5 points of 92%.
pub fn check_fig6(opts: &ValidateOptions) -> CheckOutcome {
    timed("fig6-r2-coverage", || {
        let o = run_preset("fig6", opts.seed)?;
        let r2 = r2_of(&o)?;
        let cov = o.metrics.coverage_observed;
        ensure(r2 >= 0.98 && (cov - 0.92).abs() <= 0.05, || {
            format!("R² = {r2:.4}, coverage {:.1}%", 100.0 * cov)
        })?;
        Ok(format!(
            "R² = {r2:.4} (published 0.995), coverage {:.1}%, ε = {:.3}",
            100.0 * cov,
            o.metrics.epsilon
        ))
    })
}

/// fig5 configuration: ε within 15% of 260, expected coverage 25% ± 5.
pub fn check_fig5_resolution() -> CheckOutcome {
    timed("fig5-resolution", || {
        let p = presets::find("fig5").ok_or("missing preset fig5")?;
        let s = SampledFunction::from_catalog(
            CatalogFunction::InverseX,
            (p.domain[0], p.domain[1]),
            p.n_qubits,
            GridKind::Midpoint,
        )
        .map_err(|e| e.to_string())?;
        let eps = resolution(&s, p.shots, Mode::Derivative, None).map_err(|e| e.to_string())?;
        let analytical = qft_calculus::pipelines::analytical_sq(CatalogFunction::InverseX, &s, Mode::Derivative);
        let cov = expected_coverage(&analytical, eps);
        ensure((eps - 260.0).abs() <= 0.15 * 260.0 && (cov - 0.25).abs() <= 0.05, || {
            format!("ε = {eps:.1}, expected coverage {:.1}%", 100.0 * cov)
        })?;
        Ok(format!(
            "|f| = {:.1}, ε = {eps:.1} (log10 {:.2}), expected coverage {:.1}%",
            s.l2_norm(),
            eps.log10(),
            100.0 * cov
        ))
    })
}

/// fig12a/fig12b presets reach R² ≥ 0.85 and ≥ 0.95.
pub fn check_fig12(opts: &ValidateOptions) -> CheckOutcome {
    timed("fig12-r2", || {
        let poly = r2_of(&run_preset("fig12a", opts.seed)?)?;
        let harm = r2_of(&run_preset("fig12b", opts.seed)?)?;
        ensure(poly >= 0.85 && harm >= 0.95, || {
            format!("polynomial R² = {poly:.4}, two-harmonic R² = {harm:.4}")
        })?;
        Ok(format!(
            "polynomial R² = {poly:.4} (published 0.91), two-harmonic R² = {harm:.4} (published 0.98)"
        ))
    })
}

/// Exact-mode MAE slopes against N for cos(2πx) on [-1, 1], n = 3..=8.
pub fn error_trend_slopes() -> Result<(f64, f64), String> {
    let slope = |mode: PipelineKind| -> Result<f64, String> {
        let mut ns = Vec::new();
        let mut maes = Vec::new();
        for n in 3..=8 {
            let cfg = ExperimentConfig {
                mode,
                function: "cos-2pi-x".into(),
                n_qubits: n,
                domain: Some([-1.0, 1.0]),
                shots: ShotsSpec(Shots::Exact),
                ..Default::default()
            };
            let o = execute(&cfg).map_err(|e| e.to_string())?;
            ns.push((1u64 << n) as f64);
            maes.push(o.metrics.mae.ok_or("MAE undefined")?);
        }
        loglog_slope(&ns, &maes).map_err(|e| e.to_string())
    };
    Ok((slope(PipelineKind::Qftd)?, slope(PipelineKind::Qfti)?))
}

pub fn check_error_trends() -> CheckOutcome {
    timed("error-trends", || {
        let (d, i) = error_trend_slopes()?;
        ensure((d + 2.0).abs() <= 0.3 && (i + 1.0).abs() <= 0.3, || {
            format!("QFTD slope {d:.3}, QFTI slope {i:.3}")
        })?;
        Ok(format!("QFTD slope {d:.3} (expected -2), QFTI slope {i:.3} (expected -1)"))
    })
}

pub fn run_suite(suite: Suite, opts: &ValidateOptions) -> Vec<CheckOutcome> {
    let mut out = vec![
        check_qftd_oracle(opts),
        check_qfti_oracle(opts),
        check_block_encodings(),
        check_qft_dft(),
        check_wavenumber_branches(opts),
        check_sampling_chi_square(opts),
        check_reproducibility(opts),
    ];
    if suite == Suite::Full {
        out.extend([
            check_fig4(opts),
            check_fig6(opts),
            check_fig5_resolution(),
            check_fig12(opts),
            check_error_trends(),
        ]);
    }
    out
}

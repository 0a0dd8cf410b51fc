//! End-to-end derivative (QFTD) and integral (QFTI) executions with
//! amplitude recovery and resolution censoring.

use std::fmt;

use crate::circuits::{angle_schedule, qft, wavenumber_rotation, Mode, WavenumberSchedule};
use crate::error::{Error, Result};
use crate::log2_exact;
use crate::psmpo::{self, apply_partial_sum, BlockEncoding, REG_B, REG_C};
use crate::reference::CatalogFunction;
use crate::state::{amplitude_encode, Control, GateOp, RegisterLayout, SingleQubitGate, Statevector, ANCILLA, DATA};
use crate::tol;

/// Number of shots, or exact probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shots {
    Exact,
    Count(u64),
}

impl fmt::Display for Shots {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Shots::Exact => f.write_str("exact"),
            Shots::Count(m) => write!(f, "{m}"),
        }
    }
}

/// Sample placement within each grid cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GridKind {
    /// `x_j = a + jΔx`.
    #[default]
    Left,
    /// `x_j = a + (j + ½)Δx`.
    Midpoint,
}

/// Uniform grid samples. `x_j = x0 + j·dx`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    samples: Vec<f64>,
    x0: f64,
    dx: f64,
    l2_norm: f64,
}

impl SampledFunction {
    pub fn new(samples: Vec<f64>, x0: f64, dx: f64) -> Result<Self> {
        log2_exact(samples.len()).ok_or(Error::NotPowerOfTwo(samples.len()))?;
        if !(dx > 0.0 && dx.is_finite()) || !x0.is_finite() {
            return Err(Error::InvalidArgument(format!("bad grid: x0 = {x0}, dx = {dx}")));
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("samples must be finite".into()));
        }
        let l2_norm = samples.iter().map(|v| v * v).sum::<f64>().sqrt();
        if l2_norm == 0.0 {
            return Err(Error::ZeroNorm);
        }
        Ok(Self {
            samples,
            x0,
            dx,
            l2_norm,
        })
    }

    /// Samples `f` at `2^n` points of `[a, b)`.
    pub fn from_catalog(f: CatalogFunction, domain: (f64, f64), n: usize, grid: GridKind) -> Result<Self> {
        let (a, b) = domain;
        if !(b > a) {
            return Err(Error::InvalidArgument(format!("empty domain [{a}, {b}]")));
        }
        if n == 0 || n > 30 {
            return Err(Error::InvalidArgument(format!("{n} qubits out of range")));
        }
        let len = 1usize << n;
        let dx = (b - a) / len as f64;
        let x0 = match grid {
            GridKind::Left => a,
            GridKind::Midpoint => a + dx / 2.0,
        };
        let samples = (0..len).map(|j| f.value(x0 + j as f64 * dx)).collect();
        Self::new(samples, x0, dx)
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn l2_norm(&self) -> f64 {
        self.l2_norm
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn n_qubits(&self) -> usize {
        self.samples.len().trailing_zeros() as usize
    }

    pub fn x(&self, j: usize) -> f64 {
        self.x0 + j as f64 * self.dx
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.len()).map(|j| self.x(j)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecoveredPoint {
    pub x: f64,
    pub value_sq: f64,
    pub retained: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecoveredSeries {
    pub points: Vec<RecoveredPoint>,
    pub resolution_epsilon: f64,
    pub mode: Mode,
    pub shots_used: Shots,
    /// Exact success-branch mass, or the observed success fraction.
    pub success_probability: f64,
    /// Recovery constant: `(|f|/Δx)²` or `(|f|ηΔx)²`.
    pub scale: f64,
}

impl RecoveredSeries {
    pub fn values_sq(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.value_sq).collect()
    }

    pub fn retained(&self) -> Vec<bool> {
        self.points.iter().map(|p| p.retained).collect()
    }

    pub fn xs(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.x).collect()
    }

    pub fn coverage(&self) -> f64 {
        self.points.iter().filter(|p| p.retained).count() as f64 / self.points.len() as f64
    }

    /// Points that enter goodness-of-fit metrics. For derivatives the two
    /// end points are dropped as well as censored ones, since their stencil
    /// wraps around the domain.
    pub fn fit_mask(&self) -> Vec<bool> {
        let n = self.points.len();
        self.points
            .iter()
            .enumerate()
            .map(|(j, p)| match self.mode {
                Mode::Derivative => p.retained && j > 0 && j + 1 < n,
                Mode::Integral => p.retained,
            })
            .collect()
    }
}

/// `|f|²/(MΔx²)` for derivatives, `(|f|ηΔx)²/M` for integrals.
pub fn resolution(f: &SampledFunction, shots: u64, mode: Mode, eta: Option<f64>) -> Result<f64> {
    if shots == 0 {
        return Err(Error::InvalidArgument("shots must be at least 1".into()));
    }
    Ok(recovery_scale(f, mode, eta)? / shots as f64)
}

/// Fraction of `analytical_sq` strictly above `epsilon`.
pub fn expected_coverage(analytical_sq: &[f64], epsilon: f64) -> f64 {
    if analytical_sq.is_empty() {
        return 0.0;
    }
    analytical_sq.iter().filter(|&&v| v > epsilon).count() as f64 / analytical_sq.len() as f64
}

/// Squared analytical derivative, or squared integral from `x0`, on the grid.
pub fn analytical_sq(f: CatalogFunction, sampled: &SampledFunction, mode: Mode) -> Vec<f64> {
    sampled
        .xs()
        .into_iter()
        .map(|x| match mode {
            Mode::Derivative => f.derivative(x).powi(2),
            Mode::Integral => f.integral_from(sampled.x0(), x).powi(2),
        })
        .collect()
}

fn recovery_scale(f: &SampledFunction, mode: Mode, eta: Option<f64>) -> Result<f64> {
    match (mode, eta) {
        (Mode::Derivative, None) => Ok((f.l2_norm / f.dx).powi(2)),
        (Mode::Integral, Some(eta)) => Ok((f.l2_norm * eta * f.dx).powi(2)),
        (Mode::Derivative, Some(_)) => Err(Error::InvalidArgument("η only applies to integrals".into())),
        (Mode::Integral, None) => Err(Error::InvalidArgument("integral resolution needs η".into())),
    }
}

fn check_size(f: &SampledFunction) -> Result<()> {
    if f.n_qubits() < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 4 samples, got {}",
            f.len()
        )));
    }
    Ok(())
}

/// Measures the `|base + (j << k_offset)>` outcomes and recovers values.
fn recover(
    state: &Statevector,
    f: &SampledFunction,
    base: usize,
    shots: Shots,
    seed: u64,
    mode: Mode,
    scale: f64,
) -> Result<RecoveredSeries> {
    let k_offset = state.layout().register(DATA)?.offset;
    let index = |j: usize| base | (j << k_offset);
    let (psi_sq, retained): (Vec<f64>, Vec<bool>) = match shots {
        Shots::Exact => {
            let probs = state.exact_probabilities();
            (0..f.len())
                .map(|j| {
                    let p = probs[index(j)];
                    if p > tol::EXACT_PROBABILITY_FLOOR {
                        (p, true)
                    } else {
                        (0.0, false)
                    }
                })
                .unzip()
        }
        Shots::Count(m) => {
            let hist = state.sample(m, seed)?;
            (0..f.len())
                .map(|j| {
                    let c = hist.count(index(j));
                    (c as f64 / m as f64, c > 0)
                })
                .unzip()
        }
    };
    let success_probability = match shots {
        Shots::Exact => (0..f.len()).map(|j| state.amplitude(index(j)).norm_sqr()).sum(),
        Shots::Count(_) => psi_sq.iter().sum(),
    };
    let resolution_epsilon = match shots {
        Shots::Exact => scale * tol::EXACT_PROBABILITY_FLOOR,
        Shots::Count(m) => scale / m as f64,
    };
    let points = psi_sq
        .iter()
        .zip(&retained)
        .enumerate()
        .map(|(j, (&p, &r))| RecoveredPoint {
            x: f.x(j),
            value_sq: scale * p,
            retained: r,
        })
        .collect();
    Ok(RecoveredSeries {
        points,
        resolution_epsilon,
        mode,
        shots_used: shots,
        success_probability,
        scale,
    })
}

/// Derivative pipeline: encode, QFT, wavenumber rotation, inverse QFT on
/// the `a = 1` branch, measure.
pub fn qftd_run(f: &SampledFunction, shots: Shots, seed: u64) -> Result<RecoveredSeries> {
    let schedule = angle_schedule(f.n_qubits(), Mode::Derivative)?;
    qftd_run_with_schedule(f, shots, seed, &schedule)
}

/// [`qftd_run`] with a caller-supplied rotation schedule.
pub fn qftd_run_with_schedule(
    f: &SampledFunction,
    shots: Shots,
    seed: u64,
    schedule: &WavenumberSchedule,
) -> Result<RecoveredSeries> {
    check_size(f)?;
    let state = qftd_state(f, schedule)?;
    let a = state.layout().qubit(ANCILLA)?;
    let base = (schedule.success_bit() as usize) << a;
    let scale = recovery_scale(f, Mode::Derivative, None)?;
    recover(&state, f, base, shots, seed, Mode::Derivative, scale)
}

/// Final QFTD state before measurement, on the layout `[a, k]`.
pub fn qftd_state(f: &SampledFunction, schedule: &WavenumberSchedule) -> Result<Statevector> {
    if schedule.mode() != Mode::Derivative {
        return Err(Error::InvalidArgument("derivative pipeline needs a derivative schedule".into()));
    }
    let layout = RegisterLayout::new(&[(ANCILLA, 1), (DATA, f.n_qubits())])?;
    let (mut state, _) = amplitude_encode(&f.samples, layout)?;
    let a = state.layout().qubit(ANCILLA)?;
    qft(&mut state, DATA, false, None)?;
    wavenumber_rotation(&mut state, schedule)?;
    qft(&mut state, DATA, true, Some(Control::on_one(a)))?;
    Ok(state)
}

/// Integral pipeline: encode with the ancilla flipped to 1, QFT, integral
/// rotation, inverse QFT and partial sum on the `a = 1` branch, then
/// post-select the encoding's success prefix.
pub fn qfti_run(f: &SampledFunction, enc: &BlockEncoding, shots: Shots, seed: u64) -> Result<RecoveredSeries> {
    let schedule = angle_schedule(f.n_qubits(), Mode::Integral)?;
    qfti_run_with_schedule(f, enc, shots, seed, &schedule)
}

/// [`qfti_run`] with a caller-supplied rotation schedule.
pub fn qfti_run_with_schedule(
    f: &SampledFunction,
    enc: &BlockEncoding,
    shots: Shots,
    seed: u64,
    schedule: &WavenumberSchedule,
) -> Result<RecoveredSeries> {
    check_size(f)?;
    let state = qfti_state(f, enc, schedule)?;
    let base = psmpo::success_base_index(state.layout(), enc.success_prefix())?;
    let scale = recovery_scale(f, Mode::Integral, Some(enc.eta()))?;
    recover(&state, f, base, shots, seed, Mode::Integral, scale)
}

/// Final QFTI state before measurement, on the layout `[a, b, c, k]`.
pub fn qfti_state(f: &SampledFunction, enc: &BlockEncoding, schedule: &WavenumberSchedule) -> Result<Statevector> {
    if schedule.mode() != Mode::Integral {
        return Err(Error::InvalidArgument("integral pipeline needs an integral schedule".into()));
    }
    if enc.n_k() != f.n_qubits() {
        return Err(Error::DimensionMismatch {
            expected: enc.n_k(),
            actual: f.n_qubits(),
        });
    }
    let layout = RegisterLayout::new(&[(ANCILLA, 1), (REG_B, 1), (REG_C, 1), (DATA, f.n_qubits())])?;
    let (mut state, _) = amplitude_encode(&f.samples, layout)?;
    let a = state.layout().qubit(ANCILLA)?;
    if schedule.ancilla_init() == 1 {
        state.apply_gate(&GateOp::Single {
            target: a,
            gate: SingleQubitGate::x(),
        })?;
    }
    qft(&mut state, DATA, false, None)?;
    wavenumber_rotation(&mut state, schedule)?;
    let control = Control::on_one(a);
    qft(&mut state, DATA, true, Some(control))?;
    apply_partial_sum(&mut state, enc, control)?;
    Ok(state)
}

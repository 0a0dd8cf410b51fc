//! Register QFT and the ancilla-controlled wavenumber rotation cascade.
//!
//! Forward QFT convention: `|j> -> N^{-1/2} Σ_k exp(-2πi jk/N) |k>`. Under
//! this sign the central-difference stencil `(f_{j+1} - f_{j-1}) / 2` has
//! spectrum `i sin(2πk/N) F_k`, and the overlapping trapezoid
//! `(f_{j+1} + f_{j-1}) / 2` has spectrum `cos(2πk/N) F_k`.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};

use crate::error::{Error, Result};
use crate::state::{Control, GateOp, SingleQubitGate, Statevector, ANCILLA, DATA};
use crate::tol;

/// Which modified wavenumber the rotation cascade deposits on the success
/// branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// `i sin(2πk/N)`, ancilla starts in `|0>`.
    Derivative,
    /// `cos(2πk/N)`, ancilla starts in `|1>`.
    Integral,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Derivative => "derivative",
            Mode::Integral => "integral",
        })
    }
}

/// An angle `numerator · π / 2^log2_den`, kept exact until applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DyadicAngle {
    numerator: i64,
    log2_den: u32,
}

impl DyadicAngle {
    pub fn new(numerator: i64, log2_den: u32) -> Self {
        Self {
            numerator,
            log2_den,
        }
        .reduced()
    }

    fn reduced(mut self) -> Self {
        while self.log2_den > 0 && self.numerator % 2 == 0 {
            self.numerator /= 2;
            self.log2_den -= 1;
        }
        if self.numerator == 0 {
            self.log2_den = 0;
        }
        self
    }

    pub fn numerator(&self) -> i64 {
        self.numerator
    }

    pub fn log2_den(&self) -> u32 {
        self.log2_den
    }

    /// Numerator of this angle over the common denominator `2^log2_den · π`.
    /// `None` if the angle needs a finer denominator.
    pub fn numerator_over(&self, log2_den: u32) -> Option<i64> {
        let shift = log2_den.checked_sub(self.log2_den)?;
        self.numerator.checked_mul(1i64.checked_shl(shift)?)
    }

    pub fn radians(&self) -> f64 {
        // Division by a power of two is exact in binary floating point.
        self.numerator as f64 * PI / (1u64 << self.log2_den) as f64
    }

    pub fn scaled(&self, factor: i64) -> Self {
        Self::new(self.numerator * factor, self.log2_den)
    }
}

impl fmt::Display for DyadicAngle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.log2_den {
            0 => write!(f, "{}π", self.numerator),
            k => write!(f, "{}π/{}", self.numerator, 1u64 << k),
        }
    }
}

/// Controlled-`Rx` angles of the wavenumber rotation on an `n`-qubit
/// k-register. Qubit `p` of the register controls `Rx(angles[p])` on the
/// ancilla, with `angles[p] = -2^(p-n+2) π` so that the ancilla rotates by
/// `θ_p = 2^(p-n+1) π` and the total rotation for basis `|k>` is `2πk/N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WavenumberSchedule {
    n: usize,
    mode: Mode,
    angles: Vec<DyadicAngle>,
    ancilla_init: u8,
    success_bit: u8,
}

impl WavenumberSchedule {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// `Rx` arguments `φ_p`.
    pub fn angles(&self) -> &[DyadicAngle] {
        &self.angles
    }

    pub fn ancilla_init(&self) -> u8 {
        self.ancilla_init
    }

    pub fn success_bit(&self) -> u8 {
        self.success_bit
    }

    /// Ancilla rotation `θ_p = -φ_p / 2` contributed by qubit `p`.
    pub fn rotation(&self, p: usize) -> DyadicAngle {
        let a = self.angles[p];
        DyadicAngle::new(-a.numerator, a.log2_den + 1)
    }

    /// Exact `θ_k = Σ_p θ_p k_p`, returned as `m` with `θ_k = m π / 2^n`.
    /// `None` if some rotation is not a multiple of `π / 2^n`.
    pub fn reconstructed_theta_numerator(&self, k: usize) -> Option<i64> {
        let den = self.n as u32;
        (0..self.n)
            .filter(|p| (k >> p) & 1 == 1)
            .try_fold(0i64, |acc, p| acc.checked_add(self.rotation(p).numerator_over(den)?))
    }

    /// Replaces one angle. Only meant for mutation testing of validators:
    /// the resulting schedule no longer reconstructs `2πk/N`.
    pub fn with_angle(mut self, p: usize, angle: DyadicAngle) -> Self {
        self.angles[p] = angle;
        self
    }

    /// Whether every angle equals `-2^(p-n+2) π`.
    pub fn is_canonical(&self) -> bool {
        self.angles
            .iter()
            .enumerate()
            .all(|(p, a)| *a == canonical_angle(p, self.n))
    }
}

fn canonical_angle(p: usize, n: usize) -> DyadicAngle {
    DyadicAngle::new(-(1i64 << (p + 2)), n as u32)
}

/// Rotation schedule for an `n`-qubit k-register.
pub fn angle_schedule(n: usize, mode: Mode) -> Result<WavenumberSchedule> {
    if n == 0 {
        return Err(Error::InvalidArgument("k-register needs at least one qubit".into()));
    }
    if n > 60 {
        return Err(Error::InvalidArgument(format!("{n} qubits exceeds dyadic angle range")));
    }
    let ancilla_init = match mode {
        Mode::Derivative => 0,
        Mode::Integral => 1,
    };
    Ok(WavenumberSchedule {
        n,
        mode,
        angles: (0..n).map(|p| canonical_angle(p, n)).collect(),
        ancilla_init,
        success_bit: 1,
    })
}

/// Applies the QFT (or its inverse) to the named register, optionally only
/// on the branch where `control` holds.
pub fn qft(state: &mut Statevector, register: &str, inverse: bool, control: Option<Control>) -> Result<()> {
    let reg = state.layout().register(register)?;
    let qubits: Vec<usize> = reg.qubits().collect();
    let n = 1usize << qubits.len();
    let direction = if inverse {
        FftDirection::Inverse
    } else {
        FftDirection::Forward
    };
    let fft = FftPlanner::<f64>::new().plan_fft(n, direction);
    let scale = 1.0 / (n as f64).sqrt();
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    state.map_register(&qubits, control, |buf| {
        if buf.iter().all(|a| a.norm_sqr() == 0.0) {
            return;
        }
        fft.process_with_scratch(buf, &mut scratch);
        buf.iter_mut().for_each(|a| *a *= scale);
    })
}

/// Controlled-`Rx` cascade from the k-register onto the ancilla `a`.
///
/// The ancilla must be in the schedule's initialization bit. Afterwards the
/// `|k>|success>` amplitude is `i sin(2πk/N) F_k` (derivative) or
/// `cos(2πk/N) F_k` (integral), with the complementary trigonometric factor
/// on the other ancilla branch.
pub fn wavenumber_rotation(state: &mut Statevector, schedule: &WavenumberSchedule) -> Result<()> {
    let ancilla = state.layout().qubit(ANCILLA)?;
    let data = state.layout().register(DATA)?.clone();
    if data.width != schedule.n() {
        return Err(Error::DimensionMismatch {
            expected: schedule.n(),
            actual: data.width,
        });
    }
    let init = schedule.ancilla_init();
    let off_branch = state.weight_where(|i| ((i >> ancilla) & 1) as u8 != init);
    if off_branch.sqrt() > tol::UNITARITY {
        return Err(Error::AncillaNotInBasisState {
            qubit: ancilla,
            expected: init,
            weight: off_branch,
        });
    }
    for (p, angle) in schedule.angles().iter().enumerate() {
        state.apply_gate(&GateOp::Controlled {
            control: Control::on_one(data.offset + p),
            target: ancilla,
            gate: SingleQubitGate::rx(angle.radians()),
        })?;
    }
    Ok(())
}

/// Textbook gate counts of the circuits, reported rather than simulated: the
/// simulator applies the QFT as a register transform and the partial-sum
/// operator as one dense unitary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct GateCount {
    pub hadamard: usize,
    pub controlled_phase: usize,
    pub swap: usize,
    pub controlled_rx: usize,
    pub pauli_x: usize,
    pub dense_unitary: usize,
}

impl GateCount {
    pub fn total(&self) -> usize {
        self.hadamard + self.controlled_phase + self.swap + self.controlled_rx + self.pauli_x + self.dense_unitary
    }

    /// Gate count of one `n`-qubit QFT: `n` Hadamards, `n(n-1)/2`
    /// controlled phases and `⌊n/2⌋` swaps.
    pub fn qft(n: usize) -> Self {
        Self {
            hadamard: n,
            controlled_phase: n * n.saturating_sub(1) / 2,
            swap: n / 2,
            ..Self::default()
        }
    }

    /// Full QFTD (derivative) or QFTI (integral) circuit on `n` k-qubits.
    pub fn circuit(n: usize, mode: Mode) -> Self {
        let qft = Self::qft(n);
        let mut count = Self {
            hadamard: 2 * qft.hadamard,
            controlled_phase: 2 * qft.controlled_phase,
            swap: 2 * qft.swap,
            controlled_rx: n,
            ..Self::default()
        };
        if mode == Mode::Integral {
            count.pauli_x = 1;
            count.dense_unitary = 1;
        }
        count
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;
    use crate::state::{amplitude_encode, RegisterLayout};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Explicit unitary DFT matrix with the forward `exp(-2πi jk/N)` sign.
    fn dft_matrix(n: usize) -> Matrix<Complex64> {
        let s = 1.0 / (n as f64).sqrt();
        Matrix::from_fn(n, n, |k, j| {
            Complex64::from_polar(s, -2.0 * PI * ((j * k) % n) as f64 / n as f64)
        })
    }

    fn pseudo_random_state(layout: RegisterLayout, seed: u64) -> Statevector {
        let mut x = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let mut next = || {
            x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (x >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let amps: Vec<Complex64> = (0..layout.dim()).map(|_| c(next(), next())).collect();
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        Statevector::from_amplitudes(layout, amps.into_iter().map(|a| a / norm).collect()).unwrap()
    }

    #[test]
    fn qft_of_zero_is_uniform() {
        let mut s = Statevector::zero(RegisterLayout::single(DATA, 3).unwrap());
        qft(&mut s, DATA, false, None).unwrap();
        let expected = 1.0 / 8f64.sqrt();
        assert!(s.amplitudes().iter().all(|a| (a - c(expected, 0.0)).norm() < 1e-15));
    }

    #[test]
    fn qft_of_basis_one_on_two_qubits() {
        let mut s = Statevector::basis(RegisterLayout::single(DATA, 2).unwrap(), 1).unwrap();
        qft(&mut s, DATA, false, None).unwrap();
        // Column 1 of the 4x4 DFT matrix.
        let dft = dft_matrix(4);
        for k in 0..4 {
            assert!((s.amplitude(k) - dft[(k, 1)]).norm() < 1e-15);
        }
        let expected = [c(0.5, 0.0), c(0.0, -0.5), c(-0.5, 0.0), c(0.0, 0.5)];
        for (a, e) in s.amplitudes().iter().zip(expected) {
            assert!((a - e).norm() < 1e-15);
        }
    }

    #[test]
    fn qft_matches_dft_matrix_up_to_five_qubits() {
        for n in 1..=5 {
            let layout = RegisterLayout::single(DATA, n).unwrap();
            let dft = dft_matrix(1 << n);
            for j in 0..(1 << n) {
                let mut s = Statevector::basis(layout.clone(), j).unwrap();
                qft(&mut s, DATA, false, None).unwrap();
                for k in 0..(1 << n) {
                    assert!((s.amplitude(k) - dft[(k, j)]).norm() < 1e-12, "n={n} j={j} k={k}");
                }
            }
        }
    }

    #[test]
    fn inverse_undoes_forward() {
        let layout = RegisterLayout::new(&[("a", 1), (DATA, 4)]).unwrap();
        let original = pseudo_random_state(layout, 3);
        let mut s = original.clone();
        qft(&mut s, DATA, false, None).unwrap();
        qft(&mut s, DATA, true, None).unwrap();
        for (a, b) in s.amplitudes().iter().zip(original.amplitudes()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn controlled_qft_leaves_inactive_branch() {
        let layout = RegisterLayout::new(&[("a", 1), (DATA, 3)]).unwrap();
        let original = pseudo_random_state(layout, 11);
        let mut s = original.clone();
        qft(&mut s, DATA, true, Some(Control::on_one(3))).unwrap();
        for i in 0..8 {
            assert_eq!(s.amplitude(i), original.amplitude(i));
        }
        assert!((s.norm() - 1.0).abs() < tol::STATE_NORM);
    }

    #[test]
    fn qft_unknown_register() {
        let mut s = Statevector::zero(RegisterLayout::single(DATA, 2).unwrap());
        assert!(matches!(qft(&mut s, "z", false, None), Err(Error::UnknownRegister(_))));
    }

    #[test]
    fn schedule_angles_for_three_qubits() {
        let s = angle_schedule(3, Mode::Derivative).unwrap();
        let radians: Vec<f64> = s.angles().iter().map(|a| a.radians()).collect();
        assert_eq!(radians, vec![-PI / 2.0, -PI, -2.0 * PI]);
        assert_eq!(s.angles()[0], DyadicAngle::new(-1, 1));
        assert_eq!((s.ancilla_init(), s.success_bit()), (0, 1));
        let s = angle_schedule(3, Mode::Integral).unwrap();
        assert_eq!((s.ancilla_init(), s.success_bit()), (1, 1));
        assert!(s.is_canonical());
    }

    #[test]
    fn schedule_reconstructs_two_pi_k_over_n() {
        // θ_k = 2πk/N = (2k) π / 2^n.
        for n in [1usize, 3, 8, 12] {
            let s = angle_schedule(n, Mode::Derivative).unwrap();
            for k in 0..(1usize << n) {
                assert_eq!(s.reconstructed_theta_numerator(k), Some(2 * k as i64), "n={n} k={k}");
            }
        }
        let s = angle_schedule(1, Mode::Derivative).unwrap();
        assert_eq!(s.rotation(0).radians(), PI);
        let s8 = angle_schedule(8, Mode::Derivative).unwrap();
        let theta_255 = (0..8).map(|p| s8.rotation(p).radians()).sum::<f64>();
        assert!((theta_255 - 2.0 * PI * 255.0 / 256.0).abs() < 1e-14);
    }

    #[test]
    fn schedule_rejects_zero_width() {
        assert!(angle_schedule(0, Mode::Integral).is_err());
    }

    #[test]
    fn tampered_schedule_is_detected() {
        let s = angle_schedule(3, Mode::Derivative).unwrap();
        let doubled = s.angles()[0].scaled(2);
        let t = s.with_angle(0, doubled);
        assert!(!t.is_canonical());
        assert_ne!(t.reconstructed_theta_numerator(1), Some(2));
    }

    /// Applies the rotation to an arbitrary normalized spectrum and returns
    /// (state, spectrum) for branch checks.
    fn rotated(n: usize, mode: Mode, seed: u64) -> (Statevector, Vec<Complex64>) {
        let layout = RegisterLayout::new(&[("a", 1), (DATA, n)]).unwrap();
        let spec_state = pseudo_random_state(RegisterLayout::single(DATA, n).unwrap(), seed);
        let spectrum = spec_state.amplitudes().to_vec();
        let mut amps = vec![c(0.0, 0.0); layout.dim()];
        let schedule = angle_schedule(n, mode).unwrap();
        let a_bit = (schedule.ancilla_init() as usize) << n;
        for (k, f) in spectrum.iter().enumerate() {
            amps[a_bit | k] = *f;
        }
        let mut s = Statevector::from_amplitudes(layout, amps).unwrap();
        wavenumber_rotation(&mut s, &schedule).unwrap();
        (s, spectrum)
    }

    #[test]
    fn zero_wavenumber_component() {
        let (s, _) = rotated(3, Mode::Derivative, 5);
        assert_eq!(s.amplitude(1 << 3), c(0.0, 0.0));
        let (s, spectrum) = rotated(3, Mode::Integral, 5);
        assert!((s.amplitude(1 << 3) - spectrum[0]).norm() < 1e-15);
    }

    #[test]
    fn derivative_success_branch_matches_dense_cascade() {
        // Dense oracle: product of the controlled-Rx cascade as full matrices.
        let n = 3;
        let dim = 1 << (n + 1);
        let mut cascade = Matrix::<Complex64>::identity(dim);
        let schedule = angle_schedule(n, Mode::Derivative).unwrap();
        for (p, angle) in schedule.angles().iter().enumerate() {
            let rx = *SingleQubitGate::rx(angle.radians()).matrix();
            let gate = Matrix::from_fn(dim, dim, |r, col| {
                let same_k = (r & 0b111) == (col & 0b111);
                if !same_k {
                    return c(0.0, 0.0);
                }
                if (col >> p) & 1 == 0 {
                    return if r == col { c(1.0, 0.0) } else { c(0.0, 0.0) };
                }
                rx[r >> n][col >> n]
            });
            cascade = gate.matmul(&cascade).unwrap();
        }
        let (s, spectrum) = rotated(n, Mode::Derivative, 9);
        let mut input = vec![c(0.0, 0.0); dim];
        input[..8].copy_from_slice(&spectrum);
        let dense = cascade.matvec(&input).unwrap();
        for k in 0..8 {
            let expected = c(0.0, (2.0 * PI * k as f64 / 8.0).sin()) * spectrum[k];
            assert!((s.amplitude(8 | k) - expected).norm() < 1e-12, "k={k}");
            assert!((dense[8 | k] - expected).norm() < 1e-12, "k={k}");
        }
    }

    #[test]
    fn branch_completeness_and_success_law() {
        for n in 1..=6 {
            for mode in [Mode::Derivative, Mode::Integral] {
                let (s, spectrum) = rotated(n, mode, n as u64 * 17 + 1);
                let big_n = 1 << n;
                for (k, f) in spectrum.iter().enumerate() {
                    let p0 = s.amplitude(k).norm_sqr();
                    let p1 = s.amplitude(big_n | k).norm_sqr();
                    assert!((p0 + p1 - f.norm_sqr()).abs() < 1e-12);
                    let w = 2.0 * PI * k as f64 / big_n as f64;
                    let trig = match mode {
                        Mode::Derivative => w.sin(),
                        Mode::Integral => w.cos(),
                    };
                    assert!((s.amplitude(big_n | k).norm() - trig.abs() * f.norm()).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn integral_success_branch_is_cos_scaled() {
        let (s, spectrum) = rotated(4, Mode::Integral, 21);
        for (k, f) in spectrum.iter().enumerate() {
            let expected = *f * (2.0 * PI * k as f64 / 16.0).cos();
            assert!((s.amplitude(16 | k) - expected).norm() < 1e-12);
        }
    }

    #[test]
    fn rotation_rejects_wrong_ancilla_state() {
        let layout = RegisterLayout::new(&[("a", 1), (DATA, 2)]).unwrap();
        let (mut s, _) = amplitude_encode(&[1.0, 2.0, 3.0, 4.0], layout).unwrap();
        let schedule = angle_schedule(2, Mode::Integral).unwrap();
        assert!(matches!(
            wavenumber_rotation(&mut s, &schedule),
            Err(Error::AncillaNotInBasisState { .. })
        ));
    }

    #[test]
    fn gate_counts() {
        assert_eq!(GateCount::qft(3), GateCount { hadamard: 3, controlled_phase: 3, swap: 1, ..Default::default() });
        let d = GateCount::circuit(8, Mode::Derivative);
        assert_eq!(d.controlled_rx, 8);
        assert_eq!(d.total(), 2 * (8 + 28 + 4) + 8);
        assert_eq!(GateCount::circuit(8, Mode::Integral).total(), d.total() + 2);
    }
}

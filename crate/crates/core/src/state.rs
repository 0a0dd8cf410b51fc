//! Dense statevector simulation.
//!
//! Basis index convention: qubit `q` is bit `q` of the basis index (qubit 0
//! is the least significant bit). A [`RegisterLayout`] lists registers from
//! most to least significant, so the first register occupies the top bits of
//! the index and the ancilla `a` reads as the leading bit of a printed state.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::{log2_exact, tol};

/// Name of the ancilla register. When present it must be most significant.
pub const ANCILLA: &str = "a";
/// Name of the register holding the encoded samples.
pub const DATA: &str = "k";

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// How the registers listed in a [`RegisterLayout`] map onto index bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BitOrder {
    /// First listed register holds the most significant bits.
    #[default]
    MsbFirst,
    /// First listed register holds the least significant bits.
    LsbFirst,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Register {
    pub name: String,
    /// Lowest qubit index covered by the register.
    pub offset: usize,
    pub width: usize,
}

impl Register {
    /// Value held by this register in basis state `index`.
    pub fn value(&self, index: usize) -> usize {
        (index >> self.offset) & ((1 << self.width) - 1)
    }

    /// Qubit indices of the register, least significant first.
    pub fn qubits(&self) -> impl Iterator<Item = usize> {
        self.offset..self.offset + self.width
    }

    fn mask(&self) -> usize {
        ((1 << self.width) - 1) << self.offset
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegisterLayout {
    /// Registers in the order they were declared.
    registers: Vec<Register>,
    order: BitOrder,
    n_qubits: usize,
}

impl RegisterLayout {
    /// Layout with registers listed most significant first.
    pub fn new(specs: &[(&str, usize)]) -> Result<Self> {
        Self::with_order(specs, BitOrder::MsbFirst)
    }

    pub fn with_order(specs: &[(&str, usize)], order: BitOrder) -> Result<Self> {
        if specs.is_empty() {
            return Err(Error::InvalidLayout("no registers".into()));
        }
        let n_qubits: usize = specs.iter().map(|(_, w)| *w).sum();
        if n_qubits > 30 {
            return Err(Error::InvalidLayout(format!("{n_qubits} qubits is beyond the dense budget")));
        }
        let mut registers = Vec::with_capacity(specs.len());
        let mut next_low = 0;
        let mut next_high = n_qubits;
        for &(name, width) in specs {
            if width == 0 {
                return Err(Error::InvalidLayout(format!("register `{name}` has zero width")));
            }
            if registers.iter().any(|r: &Register| r.name == name) {
                return Err(Error::InvalidLayout(format!("duplicate register `{name}`")));
            }
            let offset = match order {
                BitOrder::MsbFirst => {
                    next_high -= width;
                    next_high
                }
                BitOrder::LsbFirst => {
                    next_low += width;
                    next_low - width
                }
            };
            registers.push(Register {
                name: name.to_string(),
                offset,
                width,
            });
        }
        let layout = Self {
            registers,
            order,
            n_qubits,
        };
        if let Ok(a) = layout.register(ANCILLA) {
            if a.offset + a.width != n_qubits {
                return Err(Error::InvalidLayout(
                    "ancilla register must occupy the most significant position".into(),
                ));
            }
        }
        Ok(layout)
    }

    pub fn single(name: &str, width: usize) -> Result<Self> {
        Self::new(&[(name, width)])
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn order(&self) -> BitOrder {
        self.order
    }

    pub fn registers(&self) -> &[Register] {
        &self.registers
    }

    pub fn register(&self, name: &str) -> Result<&Register> {
        self.registers
            .iter()
            .find(|r| r.name == name)
            .ok_or_else(|| Error::UnknownRegister(name.to_string()))
    }

    /// Qubits of the named registers, least significant first, where `names`
    /// is given most significant first (so `["b", "c", "k"]` reads like a
    /// ket `|b c k>`).
    pub fn qubits_of(&self, names: &[&str]) -> Result<Vec<usize>> {
        let mut out = Vec::new();
        for name in names.iter().rev() {
            out.extend(self.register(name)?.qubits());
        }
        Ok(out)
    }

    /// The single qubit of a width-1 register.
    pub fn qubit(&self, name: &str) -> Result<usize> {
        let r = self.register(name)?;
        if r.width != 1 {
            return Err(Error::InvalidLayout(format!("register `{name}` is not a single qubit")));
        }
        Ok(r.offset)
    }
}

/// Which control value activates a controlled operation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarity {
    OnZero,
    OnOne,
}

impl Polarity {
    pub fn from_bit(bit: u8) -> Self {
        if bit == 0 {
            Polarity::OnZero
        } else {
            Polarity::OnOne
        }
    }

    pub fn bit(self) -> u8 {
        match self {
            Polarity::OnZero => 0,
            Polarity::OnOne => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Control {
    pub qubit: usize,
    pub polarity: Polarity,
}

impl Control {
    pub fn on_one(qubit: usize) -> Self {
        Self {
            qubit,
            polarity: Polarity::OnOne,
        }
    }

    pub fn on_zero(qubit: usize) -> Self {
        Self {
            qubit,
            polarity: Polarity::OnZero,
        }
    }

    fn is_active(&self, index: usize) -> bool {
        ((index >> self.qubit) & 1) as u8 == self.polarity.bit()
    }
}

/// A validated 2x2 unitary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleQubitGate([[Complex64; 2]; 2]);

impl SingleQubitGate {
    pub fn new(m: [[Complex64; 2]; 2]) -> Result<Self> {
        let residual = unitarity_residual_2x2(&m);
        if residual > tol::UNITARITY || !residual.is_finite() {
            return Err(Error::NonUnitary { residual });
        }
        Ok(Self(m))
    }

    pub fn matrix(&self) -> &[[Complex64; 2]; 2] {
        &self.0
    }

    pub fn x() -> Self {
        let (o, l) = (ZERO, Complex64::new(1.0, 0.0));
        Self([[o, l], [l, o]])
    }

    pub fn h() -> Self {
        let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self([[s, s], [s, -s]])
    }

    /// `Rx(theta) = exp(-i X theta / 2)`.
    pub fn rx(theta: f64) -> Self {
        let c = Complex64::new((theta / 2.0).cos(), 0.0);
        let s = Complex64::new(0.0, -(theta / 2.0).sin());
        Self([[c, s], [s, c]])
    }
}

fn unitarity_residual_2x2(m: &[[Complex64; 2]; 2]) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            let g = m[0][i].conj() * m[0][j] + m[1][i].conj() * m[1][j];
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g - target).norm());
        }
    }
    worst
}

/// A validated square unitary of power-of-two dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct Unitary(Matrix<Complex64>);

impl Unitary {
    pub fn new(m: Matrix<Complex64>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch {
                expected: m.rows(),
                actual: m.cols(),
            });
        }
        if log2_exact(m.rows()).is_none() {
            return Err(Error::NotPowerOfTwo(m.rows()));
        }
        let residual = m.unitarity_residual();
        if residual > tol::UNITARITY || !residual.is_finite() {
            return Err(Error::NonUnitary { residual });
        }
        Ok(Self(m))
    }

    /// Wraps a matrix whose unitarity the caller has already established.
    pub(crate) fn new_unchecked(m: Matrix<Complex64>) -> Self {
        debug_assert!(m.is_square() && m.rows().is_power_of_two());
        Self(m)
    }

    pub fn matrix(&self) -> &Matrix<Complex64> {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }
}

/// One gate application.
#[derive(Debug, Clone)]
pub enum GateOp {
    Single {
        target: usize,
        gate: SingleQubitGate,
    },
    Controlled {
        control: Control,
        target: usize,
        gate: SingleQubitGate,
    },
    /// Dense unitary on `qubits` (least significant first).
    Register { qubits: Vec<usize>, unitary: Unitary },
    ControlledRegister {
        control: Control,
        qubits: Vec<usize>,
        unitary: Unitary,
    },
}

/// Multinomial shot histogram. Merging two histograms adds counts pointwise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampledHistogram {
    pub counts: BTreeMap<usize, u64>,
    pub total_shots: u64,
    pub rng_seed: u64,
}

impl SampledHistogram {
    pub fn empty(rng_seed: u64) -> Self {
        Self {
            counts: BTreeMap::new(),
            total_shots: 0,
            rng_seed,
        }
    }

    pub fn count(&self, index: usize) -> u64 {
        self.counts.get(&index).copied().unwrap_or(0)
    }

    /// Observed frequency `count / total_shots` of a basis index.
    pub fn frequency(&self, index: usize) -> f64 {
        if self.total_shots == 0 {
            0.0
        } else {
            self.count(index) as f64 / self.total_shots as f64
        }
    }

    /// Pointwise count addition. The seed of `self` is kept.
    pub fn merge(&mut self, other: &SampledHistogram) {
        for (&k, &v) in &other.counts {
            *self.counts.entry(k).or_insert(0) += v;
        }
        self.total_shots += other.total_shots;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    amplitudes: Vec<Complex64>,
    layout: RegisterLayout,
}

impl Statevector {
    /// `|0...0>` over the layout.
    pub fn zero(layout: RegisterLayout) -> Self {
        let mut amplitudes = vec![ZERO; layout.dim()];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Self { amplitudes, layout }
    }

    pub fn basis(layout: RegisterLayout, index: usize) -> Result<Self> {
        if index >= layout.dim() {
            return Err(Error::DimensionMismatch {
                expected: layout.dim(),
                actual: index,
            });
        }
        let mut amplitudes = vec![ZERO; layout.dim()];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(Self { amplitudes, layout })
    }

    /// Wraps amplitudes that must already be normalized.
    pub fn from_amplitudes(layout: RegisterLayout, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != layout.dim() {
            return Err(Error::DimensionMismatch {
                expected: layout.dim(),
                actual: amplitudes.len(),
            });
        }
        let state = Self { amplitudes, layout };
        let norm = state.norm();
        if (norm - 1.0).abs() > tol::STATE_NORM {
            return Err(Error::InvalidArgument(format!("state norm {norm} differs from 1")));
        }
        Ok(state)
    }

    pub fn n_qubits(&self) -> usize {
        self.layout.n_qubits()
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amplitudes[index]
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Total probability of basis states satisfying `pred`.
    pub fn weight_where(&self, pred: impl Fn(usize) -> bool) -> f64 {
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| pred(*i))
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.n_qubits() {
            return Err(Error::QubitOutOfRange {
                index: q,
                n_qubits: self.n_qubits(),
            });
        }
        Ok(())
    }

    pub fn apply_gate(&mut self, op: &GateOp) -> Result<()> {
        match op {
            GateOp::Single { target, gate } => self.apply_single(*target, gate, None),
            GateOp::Controlled {
                control,
                target,
                gate,
            } => self.apply_single(*target, gate, Some(*control)),
            GateOp::Register { qubits, unitary } => self.apply_register_unitary(unitary, qubits, None),
            GateOp::ControlledRegister {
                control,
                qubits,
                unitary,
            } => self.apply_register_unitary(unitary, qubits, Some(*control)),
        }
    }

    fn apply_single(&mut self, target: usize, gate: &SingleQubitGate, control: Option<Control>) -> Result<()> {
        self.check_qubit(target)?;
        if let Some(c) = control {
            self.check_qubit(c.qubit)?;
            if c.qubit == target {
                return Err(Error::QubitCollision(target));
            }
        }
        let [[m00, m01], [m10, m11]] = *gate.matrix();
        let bit = 1usize << target;
        for i in 0..self.amplitudes.len() {
            if i & bit != 0 || control.is_some_and(|c| !c.is_active(i)) {
                continue;
            }
            let (a0, a1) = (self.amplitudes[i], self.amplitudes[i | bit]);
            self.amplitudes[i] = m00 * a0 + m01 * a1;
            self.amplitudes[i | bit] = m10 * a0 + m11 * a1;
        }
        Ok(())
    }

    /// Applies `unitary` to the subspace spanned by `qubits` (least
    /// significant first), restricted to basis states where `control` holds.
    pub fn apply_register_unitary(
        &mut self,
        unitary: &Unitary,
        qubits: &[usize],
        control: Option<Control>,
    ) -> Result<()> {
        let sub_dim = 1usize << qubits.len();
        if unitary.dim() != sub_dim {
            return Err(Error::DimensionMismatch {
                expected: sub_dim,
                actual: unitary.dim(),
            });
        }
        let mut mask = 0usize;
        for &q in qubits {
            self.check_qubit(q)?;
            if mask & (1 << q) != 0 {
                return Err(Error::QubitCollision(q));
            }
            mask |= 1 << q;
        }
        if let Some(c) = control {
            self.check_qubit(c.qubit)?;
            if mask & (1 << c.qubit) != 0 {
                return Err(Error::QubitCollision(c.qubit));
            }
        }
        let offsets = scatter_offsets(qubits);
        let m = unitary.matrix();
        let mut buf = vec![ZERO; sub_dim];
        let mut out = vec![ZERO; sub_dim];
        for base in 0..self.amplitudes.len() {
            if base & mask != 0 || control.is_some_and(|c| !c.is_active(base)) {
                continue;
            }
            for (b, &off) in buf.iter_mut().zip(&offsets) {
                *b = self.amplitudes[base | off];
            }
            if buf.iter().all(|a| *a == ZERO) {
                continue;
            }
            for (r, o) in out.iter_mut().enumerate() {
                *o = m.row(r).iter().zip(&buf).map(|(u, x)| u * x).sum();
            }
            for (&o, &off) in out.iter().zip(&offsets) {
                self.amplitudes[base | off] = o;
            }
        }
        Ok(())
    }

    /// Applies `f` in place to every register sub-vector selected by
    /// `qubits` (least significant first) where `control` holds.
    pub(crate) fn map_register(
        &mut self,
        qubits: &[usize],
        control: Option<Control>,
        mut f: impl FnMut(&mut [Complex64]),
    ) -> Result<()> {
        let mut mask = 0usize;
        for &q in qubits {
            self.check_qubit(q)?;
            mask |= 1 << q;
        }
        if let Some(c) = control {
            self.check_qubit(c.qubit)?;
            if mask & (1 << c.qubit) != 0 {
                return Err(Error::QubitCollision(c.qubit));
            }
        }
        let offsets = scatter_offsets(qubits);
        let mut buf = vec![ZERO; offsets.len()];
        for base in 0..self.amplitudes.len() {
            if base & mask != 0 || control.is_some_and(|c| !c.is_active(base)) {
                continue;
            }
            for (b, &off) in buf.iter_mut().zip(&offsets) {
                *b = self.amplitudes[base | off];
            }
            f(&mut buf);
            for (&b, &off) in buf.iter().zip(&offsets) {
                self.amplitudes[base | off] = b;
            }
        }
        Ok(())
    }

    /// `|amplitude_j|^2` for every basis index.
    pub fn exact_probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Multinomial shot sampling.
    ///
    /// The generator is ChaCha8 seeded through `seed_from_u64`; counts are
    /// drawn by the conditional-binomial method, visiting basis indices in
    /// ascending order and drawing each count from
    /// `Binomial(remaining_shots, p_i / remaining_mass)`. The cost is linear
    /// in the dimension and independent of the shot count.
    pub fn sample(&self, shots: u64, seed: u64) -> Result<SampledHistogram> {
        if shots == 0 {
            return Err(Error::InvalidArgument("shots must be at least 1".into()));
        }
        let probs = self.exact_probabilities();
        let total: f64 = probs.iter().sum();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut hist = SampledHistogram::empty(seed);
        hist.total_shots = shots;

        let last_nonzero = probs.iter().rposition(|&p| p > 0.0);
        let mut remaining = shots;
        let mut remaining_mass = total;
        for (i, &p) in probs.iter().enumerate() {
            if remaining == 0 {
                break;
            }
            if p <= 0.0 {
                continue;
            }
            let count = if Some(i) == last_nonzero {
                remaining
            } else {
                let q = (p / remaining_mass).clamp(0.0, 1.0);
                Binomial::new(remaining, q)
                    .map_err(|e| Error::InvalidArgument(format!("binomial draw: {e}")))?
                    .sample(&mut rng)
            };
            if count > 0 {
                hist.counts.insert(i, count);
            }
            remaining -= count;
            remaining_mass -= p;
        }
        Ok(hist)
    }
}

/// Index offsets of every sub-register value: bit `i` of the sub-index
/// lands on qubit `qubits[i]`.
fn scatter_offsets(qubits: &[usize]) -> Vec<usize> {
    (0..1usize << qubits.len())
        .map(|s| {
            qubits
                .iter()
                .enumerate()
                .filter(|(i, _)| (s >> i) & 1 == 1)
                .fold(0, |acc, (_, &q)| acc | (1 << q))
        })
        .collect()
}

/// Amplitude-encodes `samples` into the data register `k` of `layout`, all
/// other registers in `|0>`. Returns the state and `‖samples‖₂`.
pub fn amplitude_encode(samples: &[f64], layout: RegisterLayout) -> Result<(Statevector, f64)> {
    let n = log2_exact(samples.len()).ok_or(Error::NotPowerOfTwo(samples.len()))?;
    let data = layout.register(DATA)?;
    if data.width != n as usize {
        return Err(Error::DimensionMismatch {
            expected: 1 << data.width,
            actual: samples.len(),
        });
    }
    if samples.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument("samples must be finite".into()));
    }
    let norm = samples.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::ZeroNorm);
    }
    let offset = data.offset;
    let mut amplitudes = vec![ZERO; layout.dim()];
    for (j, &x) in samples.iter().enumerate() {
        amplitudes[j << offset] = Complex64::new(x / norm, 0.0);
    }
    Ok((Statevector { amplitudes, layout }, norm))
}

/// Mask of basis-index bits covered by the named registers.
pub fn register_mask(layout: &RegisterLayout, names: &[&str]) -> Result<usize> {
    names
        .iter()
        .try_fold(0, |acc, n| Ok(acc | layout.register(n)?.mask()))
}

use num_complex::Complex64;
use proptest::prelude::*;
use qft_calculus::linalg::Matrix;
use qft_calculus::pipelines::{qftd_state, GridKind, SampledFunction};
use qft_calculus::circuits::{angle_schedule, Mode};
use qft_calculus::reference::CatalogFunction;
use qft_calculus::state::{Control, GateOp, Polarity, RegisterLayout, SingleQubitGate, Statevector, Unitary};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn random_state(n: usize, rng: &mut ChaCha8Rng) -> Statevector {
    let amps: Vec<Complex64> = (0..1 << n)
        .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    let layout = RegisterLayout::single("q", n).unwrap();
    Statevector::from_amplitudes(layout, amps.into_iter().map(|a| a / norm).collect()).unwrap()
}

/// Haar-ish unitary from Gram-Schmidt on a random complex matrix.
fn random_unitary(dim: usize, rng: &mut ChaCha8Rng) -> Matrix<Complex64> {
    let mut cols: Vec<Vec<Complex64>> = Vec::new();
    while cols.len() < dim {
        let mut v: Vec<Complex64> = (0..dim)
            .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        for u in &cols {
            let dot: Complex64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            v.iter_mut().zip(u).for_each(|(x, y)| *x -= dot * y);
        }
        let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            cols.push(v.into_iter().map(|a| a / norm).collect());
        }
    }
    Matrix::from_fn(dim, dim, |r, col| cols[col][r])
}

fn gate_matrix(g: &SingleQubitGate) -> Matrix<Complex64> {
    let m = g.matrix();
    Matrix::from_fn(2, 2, |r, col| m[r][col])
}

/// `I ⊗ .. ⊗ g ⊗ .. ⊗ I` with qubit `n-1` leftmost.
fn kron_embed(g: &Matrix<Complex64>, target: usize, n: usize) -> Matrix<Complex64> {
    let eye = Matrix::<Complex64>::identity(2);
    (0..n)
        .rev()
        .map(|q| if q == target { g.clone() } else { eye.clone() })
        .reduce(|acc, m| acc.kron(&m))
        .unwrap()
}

fn projector(control: Control, n: usize, active: bool) -> Matrix<Complex64> {
    Matrix::from_fn(1 << n, 1 << n, |r, col| {
        let on = ((r >> control.qubit) & 1) as u8 == control.polarity.bit();
        if r == col && on == active {
            c(1.0, 0.0)
        } else {
            c(0.0, 0.0)
        }
    })
}

fn controlled_embed(g: &Matrix<Complex64>, control: Control, target: usize, n: usize) -> Matrix<Complex64> {
    let on = projector(control, n, true).matmul(&kron_embed(g, target, n)).unwrap();
    let off = projector(control, n, false);
    Matrix::from_fn(1 << n, 1 << n, |r, col| on[(r, col)] + off[(r, col)])
}

/// Direct element formula for a dense unitary on arbitrary qubits.
fn register_embed(u: &Matrix<Complex64>, qubits: &[usize], n: usize) -> Matrix<Complex64> {
    let mask: usize = qubits.iter().map(|q| 1 << q).sum();
    let sub = |i: usize| {
        qubits
            .iter()
            .enumerate()
            .map(|(b, &q)| ((i >> q) & 1) << b)
            .sum::<usize>()
    };
    Matrix::from_fn(1 << n, 1 << n, |r, col| {
        if r & !mask == col & !mask {
            u[(sub(r), sub(col))]
        } else {
            c(0.0, 0.0)
        }
    })
}

fn assert_matches(state: &Statevector, full: &Matrix<Complex64>, before: &Statevector) {
    let expected = full.matvec(before.amplitudes()).unwrap();
    for (a, b) in state.amplitudes().iter().zip(&expected) {
        assert!((a - b).norm() <= 1e-12, "{a} vs {b}");
    }
}

#[test]
fn single_and_controlled_gates_match_kronecker_embedding() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for n in 1..=4 {
        for target in 0..n {
            let g = SingleQubitGate::new({
                let u = random_unitary(2, &mut rng);
                [[u[(0, 0)], u[(0, 1)]], [u[(1, 0)], u[(1, 1)]]]
            })
            .unwrap();
            let before = random_state(n, &mut rng);
            let mut s = before.clone();
            s.apply_gate(&GateOp::Single { target, gate: g }).unwrap();
            assert_matches(&s, &kron_embed(&gate_matrix(&g), target, n), &before);

            for ctl in (0..n).filter(|&q| q != target) {
                for polarity in [Polarity::OnZero, Polarity::OnOne] {
                    let control = Control { qubit: ctl, polarity };
                    let mut s = before.clone();
                    s.apply_gate(&GateOp::Controlled { control, target, gate: g }).unwrap();
                    assert_matches(&s, &controlled_embed(&gate_matrix(&g), control, target, n), &before);
                }
            }
        }
    }
}

#[test]
fn register_unitaries_match_direct_embedding() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let cases: [&[usize]; 6] = [&[0], &[1, 0], &[0, 1], &[2, 0], &[3, 1, 2], &[0, 1, 2, 3]];
    for qubits in cases {
        let n = 4;
        let u = random_unitary(1 << qubits.len(), &mut rng);
        let unitary = Unitary::new(u.clone()).unwrap();
        let before = random_state(n, &mut rng);
        let mut s = before.clone();
        s.apply_register_unitary(&unitary, qubits, None).unwrap();
        assert_matches(&s, &register_embed(&u, qubits, n), &before);
    }
    // Contiguous low qubits also agree with the Kronecker form I ⊗ U.
    let u = random_unitary(4, &mut rng);
    let full = Matrix::<Complex64>::identity(4).kron(&u);
    let before = random_state(4, &mut rng);
    let mut s = before.clone();
    s.apply_register_unitary(&Unitary::new(u).unwrap(), &[0, 1], None).unwrap();
    assert_matches(&s, &full, &before);
}

#[test]
fn controlled_register_unitary_matches_embedding() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let u = random_unitary(4, &mut rng);
    let control = Control::on_zero(3);
    let on = projector(control, 4, true).matmul(&register_embed(&u, &[2, 0], 4)).unwrap();
    let off = projector(control, 4, false);
    let full = Matrix::from_fn(16, 16, |r, col| on[(r, col)] + off[(r, col)]);
    let before = random_state(4, &mut rng);
    let mut s = before.clone();
    s.apply_gate(&GateOp::ControlledRegister {
        control,
        qubits: vec![2, 0],
        unitary: Unitary::new(u).unwrap(),
    })
    .unwrap();
    assert_matches(&s, &full, &before);
}

fn random_op(n: usize, rng: &mut ChaCha8Rng) -> GateOp {
    let target = rng.random_range(0..n);
    let gate = match rng.random_range(0..3) {
        0 => SingleQubitGate::h(),
        1 => SingleQubitGate::x(),
        _ => SingleQubitGate::rx(rng.random_range(-10.0..10.0)),
    };
    if n > 1 && rng.random_bool(0.5) {
        let mut ctl = rng.random_range(0..n - 1);
        if ctl >= target {
            ctl += 1;
        }
        let polarity = if rng.random_bool(0.5) { Polarity::OnOne } else { Polarity::OnZero };
        GateOp::Controlled {
            control: Control { qubit: ctl, polarity },
            target,
            gate,
        }
    } else {
        GateOp::Single { target, gate }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gate_sequences_preserve_norm(seed in any::<u64>(), n in 1usize..=8, depth in 1usize..60) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut s = random_state(n, &mut rng);
        for _ in 0..depth {
            s.apply_gate(&random_op(n, &mut rng)).unwrap();
        }
        prop_assert!((s.norm() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn inactive_branch_is_bit_identical(seed in any::<u64>(), n in 2usize..=7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let before = random_state(n, &mut rng);
        let op = loop {
            if let op @ GateOp::Controlled { .. } = random_op(n, &mut rng) {
                break op;
            }
        };
        let GateOp::Controlled { control, .. } = &op else { unreachable!() };
        let mut s = before.clone();
        s.apply_gate(&op).unwrap();
        for i in 0..s.dim() {
            if ((i >> control.qubit) & 1) as u8 != control.polarity.bit() {
                prop_assert_eq!(s.amplitude(i), before.amplitude(i));
            }
        }
    }
}

/// Pearson chi-square with bins of expected count below 5 pooled.
fn chi_square_passes(state: &Statevector, shots: u64, seed: u64) -> (f64, f64) {
    let probs = state.exact_probabilities();
    let hist = state.sample(shots, seed).unwrap();
    let m = shots as f64;
    let (mut stat, mut bins) = (0.0, 0usize);
    let (mut pooled_e, mut pooled_o) = (0.0, 0.0);
    for (i, &p) in probs.iter().enumerate() {
        let e = p * m;
        let o = hist.count(i) as f64;
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
    let critical = ChiSquared::new((bins - 1) as f64).unwrap().inverse_cdf(1.0 - 1e-6);
    (stat, critical)
}

#[test]
fn sampling_passes_chi_square_on_catalog_states() {
    for (i, f) in CatalogFunction::ALL.into_iter().enumerate() {
        let grid = if f.singular() { GridKind::Midpoint } else { GridKind::Left };
        let sampled = SampledFunction::from_catalog(f, f.default_domain(), 6, grid).unwrap();
        let state = qftd_state(&sampled, &angle_schedule(6, Mode::Derivative).unwrap()).unwrap();
        let (stat, critical) = chi_square_passes(&state, 1_000_000, 100 + i as u64);
        assert!(stat < critical, "{f}: χ² = {stat} ≥ {critical}");
    }
}

use proptest::prelude::*;
use qft_calculus::circuits::Mode;
use qft_calculus::pipelines::{analytical_sq, qftd_run, resolution, GridKind, SampledFunction, Shots};
use qft_calculus::reference::stencils::dft_derivative_complex;
use qft_calculus::reference::{central_difference_periodic, CatalogFunction};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn dft_derivative_equals_central_difference(
        n in 1u32..=8,
        dx in 0.001f64..10.0,
        raw in prop::collection::vec(-1e3f64..1e3, 256),
    ) {
        let samples = &raw[..1 << n];
        let spectral = dft_derivative_complex(samples, dx).unwrap();
        let stencil = central_difference_periodic(samples, dx);
        let norm = samples.iter().map(|v| v * v).sum::<f64>().sqrt();
        for (s, c) in spectral.iter().zip(&stencil) {
            prop_assert!((s.re - c).abs() <= 1e-9 * norm / dx);
            prop_assert!(s.im.abs() <= 1e-9 * norm / dx);
        }
    }
}

#[test]
fn points_below_resolution_are_mostly_censored() {
    let f = CatalogFunction::InverseX;
    let s = SampledFunction::from_catalog(f, (-1.0, 1.0), 8, GridKind::Midpoint).unwrap();
    let shots = 10_000_000;
    let eps = resolution(&s, shots, Mode::Derivative, None).unwrap();
    let analytical = analytical_sq(f, &s, Mode::Derivative);
    let seeds = 0..10u64;
    let runs: Vec<_> = seeds.map(|seed| qftd_run(&s, Shots::Count(shots), seed).unwrap()).collect();
    let exact = qftd_run(&s, Shots::Exact, 0).unwrap().values_sq();
    let interior = 1..analytical.len() - 1;

    // A point with mean count λ = value/ε is censored with probability
    // exp(-λ), which is at least one half only while λ ≤ ln 2.
    for j in interior.clone().filter(|&j| exact[j] <= 0.9 * std::f64::consts::LN_2 * eps) {
        let censored = runs.iter().filter(|r| !r.points[j].retained).count();
        assert!(censored * 2 >= runs.len(), "point {j}: censored in {censored} of {}", runs.len());
    }

    // Pooled over all interior points whose analytical value is below ε.
    // End points are excluded since their stencil wraps around the domain.
    let below: Vec<usize> = interior.filter(|&j| analytical[j] < eps).collect();
    assert!(!below.is_empty());
    let censored: usize = below
        .iter()
        .map(|&j| runs.iter().filter(|r| !r.points[j].retained).count())
        .sum();
    assert!(censored * 2 >= below.len() * runs.len(), "{censored} of {}", below.len() * runs.len());

    for run in &runs {
        for p in run.points.iter().filter(|p| p.retained) {
            assert!(p.value_sq >= run.scale / shots as f64 * (1.0 - 1e-12));
        }
    }
}

//! Acceptance criteria, one PASS/FAIL line each.

use std::process::ExitCode;
use std::time::Instant;

use qftcalc::validate::{self, CheckOutcome, Suite, ValidateOptions};

struct Criterion {
    id: u32,
    title: &'static str,
    budget_s: f64,
    run: fn(&ValidateOptions) -> Vec<CheckOutcome>,
}

const CRITERIA: &[Criterion] = &[
    Criterion {
        id: 1,
        title: "QFTD exact mode equals squared periodic central difference",
        budget_s: 5.0,
        run: |o| vec![validate::check_qftd_oracle(o)],
    },
    Criterion {
        id: 2,
        title: "QFTI exact mode equals squared cumulative trapezoid",
        budget_s: 10.0,
        run: |o| vec![validate::check_qfti_oracle(o)],
    },
    Criterion {
        id: 3,
        title: "block encoding orthogonal with H/eta leading block",
        budget_s: 10.0,
        run: |_| vec![validate::check_block_encodings()],
    },
    Criterion {
        id: 4,
        title: "fig4 and fig6 sampled R2 and coverage",
        budget_s: 600.0,
        run: |o| vec![validate::check_fig4(o), validate::check_fig6(o)],
    },
    Criterion {
        id: 5,
        title: "fig5 resolution and expected coverage",
        budget_s: 5.0,
        run: |_| vec![validate::check_fig5_resolution()],
    },
    Criterion {
        id: 6,
        title: "QFTI polynomial and two-harmonic sampled R2",
        budget_s: 600.0,
        run: |o| vec![validate::check_fig12(o)],
    },
    Criterion {
        id: 7,
        title: "exact-mode MAE slopes -2 (QFTD) and -1 (QFTI)",
        budget_s: 30.0,
        run: |_| vec![validate::check_error_trends()],
    },
    Criterion {
        id: 8,
        title: "fast validation suite incl. chi-square, branches, QFT/DFT, reproducibility",
        budget_s: 60.0,
        run: |o| validate::run_suite(Suite::Fast, o),
    },
];

fn main() -> ExitCode {
    let opts = ValidateOptions {
        tamper_schedule: false,
        seed: 1,
    };
    let mut all_passed = true;
    for c in CRITERIA {
        let start = Instant::now();
        let checks = (c.run)(&opts);
        let elapsed = start.elapsed().as_secs_f64();
        let in_budget = elapsed <= c.budget_s;
        let passed = in_budget && checks.iter().all(|k| k.passed);
        all_passed &= passed;
        let details: Vec<String> = checks
            .iter()
            .map(|k| format!("[{}] {}", if k.passed { "ok" } else { "FAILED" }, k.detail))
            .collect();
        println!(
            "{} criterion {}: {} ({elapsed:.2}s / {:.0}s budget{}) {}",
            if passed { "PASS" } else { "FAIL" },
            c.id,
            c.title,
            c.budget_s,
            if in_budget { "" } else { ", OVER BUDGET" },
            details.join("; ")
        );
    }
    if all_passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

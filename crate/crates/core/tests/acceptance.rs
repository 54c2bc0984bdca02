//! Acceptance suite: one test per criterion, each printing a pass/fail line
//! and enforcing its runtime budget. Run with `--nocapture` to see the
//! per-criterion detail lines.

use std::time::{Duration, Instant};

use kramers_sep::selftest::{self, CriterionReport};

fn run(criterion: impl FnOnce() -> CriterionReport, budget: Duration) {
    let start = Instant::now();
    let report = criterion();
    let elapsed = start.elapsed();
    for line in &report.details {
        println!("  {line}");
    }
    println!(
        "criterion {}: {} [{}] ({:.2?})",
        report.id,
        report.name,
        if report.pass { "PASS" } else { "FAIL" },
        elapsed
    );
    assert!(report.pass, "criterion {} failed", report.id);
    assert!(
        elapsed <= budget,
        "criterion {} exceeded its {budget:?} budget: {elapsed:?}",
        report.id
    );
}

#[test]
fn criterion_1_regime_classification() {
    run(selftest::criterion_1, Duration::from_secs(1));
}

#[test]
fn criterion_2_positive_control_residual_matrix() {
    run(selftest::criterion_2, Duration::from_secs(60));
}

#[test]
fn criterion_3_negative_controls() {
    run(selftest::criterion_3, Duration::from_secs(10));
}

#[test]
fn criterion_4_stationary_maxwellian() {
    run(selftest::criterion_4, Duration::from_secs(1));
}

#[test]
fn criterion_5_special_functions() {
    run(selftest::criterion_5, Duration::from_secs(5));
}

#[test]
fn criterion_6_r_identities() {
    run(selftest::criterion_6, Duration::from_secs(1));
}

#[test]
fn criterion_7_mms_cross_validation() {
    run(selftest::criterion_7, Duration::from_secs(300));
}

#[test]
fn criterion_8_ode_and_rank_checks() {
    run(selftest::criterion_8, Duration::from_secs(10));
}

#[test]
fn criterion_9_determinism() {
    // Two full numeric runs must serialize byte-identically.
    let first = selftest::run_numeric();
    run(|| selftest::criterion_9(&first), Duration::from_secs(600));
}

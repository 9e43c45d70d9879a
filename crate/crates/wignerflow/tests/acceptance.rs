//! Acceptance gate: one test per validated property of the crate, at the
//! stated tolerances, each printing its measured outcome line.
//!
//! These are the same runners behind `wignerflow validate`, so the CLI
//! table and this gate can never drift apart. A failing test here means the
//! property is genuinely violated at its tolerance — the measured values are
//! in the assertion message and the runner's doc comment carries the
//! analysis. Tolerances are never widened to make a red cell pass.

use wignerflow::checks;
use wignerflow::CheckOutcome;

fn gate(outcome: CheckOutcome) {
    let line = outcome.render();
    println!("{line}");
    assert!(outcome.passed, "{line}");
}

#[test]
fn criterion_01_normalization() {
    gate(checks::check_normalization());
}

#[test]
fn criterion_02_purity() {
    gate(checks::check_purity());
}

#[test]
fn criterion_03_marginal() {
    gate(checks::check_marginal());
}

#[test]
fn criterion_04_oracle_equivalence() {
    gate(checks::check_oracle_equivalence());
}

#[test]
fn criterion_05_eigen_energy() {
    gate(checks::check_eigen_energy());
}

#[test]
fn criterion_06_stationarity() {
    gate(checks::check_stationarity());
}

#[test]
fn criterion_07_classical_limit() {
    gate(checks::check_classical_limit());
}

#[test]
fn criterion_08_zero_nodes() {
    gate(checks::check_zero_nodes(false));
}

#[test]
fn criterion_09_alpha_suppression() {
    gate(checks::check_alpha_suppression(false));
}

#[test]
fn criterion_10_winding_bookkeeping() {
    gate(checks::check_winding_bookkeeping());
}

#[test]
fn criterion_11_trajectory_exactness() {
    gate(checks::check_trajectory_exactness());
}

#[test]
fn criterion_12_bounce_consistency() {
    gate(checks::check_bounce_consistency());
}

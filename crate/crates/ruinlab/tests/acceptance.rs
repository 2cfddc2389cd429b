//! The acceptance suite: one test per criterion, each printing its
//! pass/fail line. `cargo test --test acceptance -- --nocapture` shows the
//! measured numbers; the `ruinlab verify` subcommand runs the same checks.

use ruinlab::verify::{self, CriterionResult};

fn check(r: ruinlab::Result<CriterionResult>) {
    let r = r.expect("criterion ran to completion");
    println!("{}", r.line());
    assert!(r.passed, "{}", r.line());
}

#[test]
fn criterion_1_spectral_gap_scaling() {
    check(verify::criterion_argtral_gap());
}

#[test]
fn criterion_2_center_value_scaling() {
    check(verify::criterion_center_value());
}

#[test]
fn criterion_3_k3_closed_form_comparator() {
    check(verify::criterion_k3_closed_form());
}

#[test]
fn criterion_4_k4_tau_comparator() {
    check(verify::criterion_k4_tau_comparator());
}

#[test]
fn criterion_5_dominant_player_exponent() {
    check(verify::criterion_dominant_exponent());
}

#[test]
fn criterion_6_absorption_correctness() {
    check(verify::criterion_absorption_correctness());
}

#[test]
fn criterion_7_spherical_eigenvalue() {
    check(verify::criterion_spherical_eigenvalue());
}

#[test]
fn criterion_8_small_case_oracles() {
    check(verify::criterion_small_case_oracles());
}

#[test]
fn criterion_9_symmetry_suite() {
    check(verify::criterion_symmetry_suite());
}

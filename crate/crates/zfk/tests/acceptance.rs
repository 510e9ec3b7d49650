//! Acceptance suite: one test per criterion, each printing its pass/fail
//! line. Run with `cargo test --test acceptance -- --nocapture` to see the
//! measured values.

use zfk::verify;

fn check(result: verify::CriterionResult) {
    println!("{}", result.line());
    assert!(result.passed, "{}", result.line());
}

#[test]
fn criterion_01_wave_speed_slope() {
    check(verify::criterion_1());
}

#[test]
fn criterion_02_minimal_speed_desk_scale() {
    check(verify::criterion_2());
}

#[test]
fn criterion_03_slope_convergence() {
    check(verify::criterion_3());
}

#[test]
fn criterion_04_cbar_above_one() {
    check(verify::criterion_4());
}

#[test]
fn criterion_05_delta_independence() {
    check(verify::criterion_5());
}

#[test]
fn criterion_06_hamiltonian_conservation() {
    check(verify::criterion_6());
}

#[test]
fn criterion_07_chart_identities() {
    check(verify::criterion_7());
}

#[test]
fn criterion_08_transition_map_order() {
    check(verify::criterion_8());
}

#[test]
fn criterion_09_series_correctness() {
    check(verify::criterion_9());
}

#[test]
fn criterion_10_profile_convergence() {
    check(verify::criterion_10());
}

#[test]
fn criterion_11_pde_translation() {
    check(verify::criterion_11());
}

#[test]
fn criterion_12_symmetry_residual() {
    check(verify::criterion_12());
}

//! End-to-end acceptance battery: one test per verification criterion, each
//! printing a single summary line. Run with `--nocapture` to see the lines
//! for passing criteria too:
//!
//! ```text
//! cargo test -p delta3 --test acceptance -- --nocapture
//! ```

use delta3::verify::run_criterion;

const SEED: u64 = 2026;

fn check(id: u32) {
    let report = run_criterion(id, SEED);
    println!(
        "criterion {:>2} [{}] {} — {}",
        report.id,
        if report.passed { "pass" } else { "FAIL" },
        report.name,
        report.detail
    );
    assert!(
        report.passed,
        "criterion {} ({}) failed: {}",
        report.id, report.name, report.detail
    );
}

#[test]
fn criterion_01_sphere_eigenvalue_two() {
    check(1);
}

#[test]
fn criterion_02_helicoid_harmonic_coordinates() {
    check(2);
}

#[test]
fn criterion_03_catenoid_harmonic_coordinates() {
    check(3);
}

#[test]
fn criterion_04_curvature_ratio_identity() {
    check(4);
}

#[test]
fn criterion_05_ruled_coefficient_reconstruction() {
    check(5);
}

#[test]
fn criterion_06_helicoid_equation_system() {
    check(6);
}

#[test]
fn criterion_07_central_quadric_classification() {
    check(7);
}

#[test]
fn criterion_08_paraboloid_exclusion() {
    check(8);
}

#[test]
fn criterion_09_tensor_identity_suite() {
    check(9);
}

#[test]
fn criterion_10_shear_chart_invariance() {
    check(10);
}

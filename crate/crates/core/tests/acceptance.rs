//! Acceptance suite: one test per criterion, each printing its pass/fail
//! line (visible with --nocapture; the CLI `selftest` subcommand prints the
//! same lines). Shared implementations live in `divcorr_core::selftest`.

use divcorr_core::selftest;

fn run(report: Result<selftest::CriterionReport, divcorr_core::Error>) {
    let report = report.expect("criterion executes");
    println!("{}", report.line());
    assert!(report.passed, "{}", report.line());
}

#[test]
fn criterion_01_second_moment_of_error_term() {
    run(selftest::criterion_1_tong_second_moment());
}

#[test]
fn criterion_02_integer_scale_correlations() {
    run(selftest::criterion_2_rational_correlations());
}

#[test]
fn criterion_03_correlation_series_oracle_bracket() {
    run(selftest::criterion_3_correlation_series_bracket());
}

#[test]
fn criterion_04_irrational_decorrelation() {
    run(selftest::criterion_4_irrational_decorrelation());
}

#[test]
fn criterion_05_decomposition_identity() {
    run(selftest::criterion_5_decomposition_identity());
}

#[test]
fn criterion_06_positive_second_moment_witness() {
    run(selftest::criterion_6_positive_second_moment());
}

#[test]
fn criterion_07_conjugation_closed_form() {
    run(selftest::criterion_7_conjugation_closed_form());
}

#[test]
fn criterion_08_diagonalization_determinant() {
    run(selftest::criterion_8_diagonalization_determinant());
}

#[test]
fn criterion_09_tensor_factorization() {
    run(selftest::criterion_9_tensor_factorization());
}

#[test]
fn criterion_10_pd_certificates() {
    run(selftest::criterion_10_pd_certificates());
}

#[test]
fn criterion_11_thread_determinism() {
    run(selftest::criterion_11_thread_determinism());
}

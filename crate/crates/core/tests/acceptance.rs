//! The verification suite as an integration test target: one test per
//! criterion, each printing a pass/fail line (run with `--nocapture` to see
//! them on success).

use opcalc_core::verify::{self, CriterionReport};

const SEED: u64 = 0x5eed;

fn assert_criterion(report: CriterionReport) {
    println!(
        "criterion {} ({}): {}",
        report.id,
        report.name,
        if report.pass { "PASS" } else { "FAIL" }
    );
    if !report.pass {
        for line in &report.details {
            eprintln!("  {line}");
        }
    }
    assert!(report.pass, "criterion {} failed", report.id);
}

#[test]
fn criterion_1_fgl_axiom_suite() {
    assert_criterion(verify::criterion_1_fgl_axioms());
}

#[test]
fn criterion_2_p_series_of_presets() {
    assert_criterion(verify::criterion_2_p_series());
}

#[test]
fn criterion_3_v_extraction_round_trip() {
    assert_criterion(verify::criterion_3_v_round_trip(SEED));
}

#[test]
fn criterion_4_relation_derivation() {
    assert_criterion(verify::criterion_4_relation_derivation());
}

#[test]
fn criterion_5_hopf_quotient() {
    assert_criterion(verify::criterion_5_hopf_quotient());
}

#[test]
fn criterion_6_idempotent_suite() {
    assert_criterion(verify::criterion_6_idempotent(SEED));
}

#[test]
fn criterion_7_splitting_and_colimit() {
    assert_criterion(verify::criterion_7_splitting(SEED));
}

#[test]
fn criterion_8_delooping_calculus() {
    assert_criterion(verify::criterion_8_delooping());
}

#[test]
fn criterion_9_loop_height_bounds() {
    assert_criterion(verify::criterion_9_loop_heights());
}

#[test]
fn randomized_criteria_are_deterministic_in_the_seed() {
    let a = verify::criterion_7_splitting(42);
    let b = verify::criterion_7_splitting(42);
    assert_eq!(a.details, b.details);
    assert_eq!(a.pass, b.pass);
}

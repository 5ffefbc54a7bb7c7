//! End-to-end tests driving the built binary: golden JSON outputs for the
//! documented examples, exit codes, and schema round trips.

use std::process::{Command, Output};

fn opcalc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_opcalc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(args: &[&str]) -> serde_json::Value {
    let out = opcalc(args);
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("valid JSON on stdout")
}

#[test]
fn pseries_of_k1_at_p3() {
    let v = stdout_json(&[
        "fgl", "pseries", "--law", "kn", "--p", "3", "--n", "1", "--json",
    ]);
    assert_eq!(v["series"], "v1*s^3");
}

#[test]
fn deloop_m_equals_k_special_case() {
    let v = stdout_json(&[
        "deloop", "--k", "0", "--l", "0", "--m", "0", "--h", "1", "--p", "3", "--n", "1", "--json",
    ]);
    assert_eq!(v, serde_json::json!({"i": 1, "j": 4, "sign": 1}));
}

#[test]
fn deloop_negative_component_degree() {
    let v = stdout_json(&[
        "deloop", "--k", "0", "--l", "1", "--m", "3", "--h", "1", "--p", "3", "--n", "1", "--json",
    ]);
    assert_eq!(v, serde_json::json!({"i": 1, "j": 1, "sign": -1}));
}

#[test]
fn derive_relations_p3_n2_exponents() {
    let v = stdout_json(&["coop", "derive", "--p", "3", "--n", "2", "--json"]);
    assert_eq!(v["pi_values"], serde_json::json!([1, 4, 13]));
    assert_eq!(v["final_relation"]["lhs"], "b1^12*[vF2]");
    assert_eq!(v["final_relation"]["rhs"], "vE2*b1^4");
    let intermediates = v["intermediate_relations"].as_array().unwrap();
    assert_eq!(intermediates.len(), 1);
    assert_eq!(intermediates[0]["lhs"], "b1^3*[vF1]");
    assert_eq!(intermediates[0]["rhs"], "0");
}

#[test]
fn split_verify_reports_all_properties() {
    let v = stdout_json(&[
        "split", "verify", "--p", "3", "--n", "1", "--h", "1", "--json",
    ]);
    for key in [
        "idempotent",
        "central",
        "absorbs_suspension",
        "companion_factors",
    ] {
        assert_eq!(v[key], true, "property {key}");
    }
}

#[test]
fn coop_height_with_and_without_self_relation() {
    let v = stdout_json(&["coop", "height", "--p", "3", "--n", "1", "--json"]);
    assert_eq!(v["additive_height"], 2);
    assert_eq!(v["unstable_bounds"], serde_json::json!([2, 3]));
    let v = stdout_json(&[
        "coop",
        "height",
        "--p",
        "3",
        "--n",
        "1",
        "--self-model",
        "--json",
    ]);
    assert_eq!(v["additive_height"], 1);
}

#[test]
fn config_errors_exit_2() {
    for args in [
        vec!["fgl", "pseries", "--law", "kn", "--p", "4", "--n", "1"],
        vec!["fgl", "pseries", "--law", "kn", "--p", "2", "--n", "1"],
        vec!["fgl", "pseries", "--law", "kn", "--p", "3", "--n", "0"],
        vec![
            "fgl", "pseries", "--law", "kn", "--p", "3", "--n", "2", "--prec", "4",
        ],
        vec!["fgl", "check", "--law", "file"],
    ] {
        let out = opcalc(&args);
        assert_eq!(out.status.code(), Some(2), "args: {args:?}");
    }
}

#[test]
fn usage_errors_exit_2() {
    let out = opcalc(&["no-such-command"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn custom_law_from_file_is_axiom_checked() {
    let dir = std::env::temp_dir();
    let good = dir.join("opcalc_test_good_fgl.json");
    // the multiplicative law x1 + x2 + x1 x2 over F_3
    std::fs::write(
        &good,
        serde_json::json!({
            "ring": {"characteristic": 3, "generators": []},
            "series": {
                "vars": ["x1", "x2"],
                "precision": 8,
                "terms": [
                    {"exps": [1, 0], "coeff": [{"value": "1"}]},
                    {"exps": [0, 1], "coeff": [{"value": "1"}]},
                    {"exps": [1, 1], "coeff": [{"value": "1"}]}
                ]
            }
        })
        .to_string(),
    )
    .unwrap();
    let out = opcalc(&[
        "fgl",
        "check",
        "--law",
        "file",
        "--p",
        "3",
        "--file",
        good.to_str().unwrap(),
    ]);
    assert!(out.status.success());

    let bad = dir.join("opcalc_test_bad_fgl.json");
    // x1 + x2 + x1^2 fails unitality and must be rejected on load
    std::fs::write(
        &bad,
        serde_json::json!({
            "ring": {"characteristic": 3, "generators": []},
            "series": {
                "vars": ["x1", "x2"],
                "precision": 8,
                "terms": [
                    {"exps": [1, 0], "coeff": [{"value": "1"}]},
                    {"exps": [0, 1], "coeff": [{"value": "1"}]},
                    {"exps": [2, 0], "coeff": [{"value": "1"}]}
                ]
            }
        })
        .to_string(),
    )
    .unwrap();
    let out = opcalc(&[
        "fgl",
        "check",
        "--law",
        "file",
        "--p",
        "3",
        "--file",
        bad.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn series_json_round_trips_through_the_schema() {
    let v = stdout_json(&[
        "fgl", "pseries", "--law", "kn", "--p", "3", "--n", "2", "--json",
    ]);
    let data: opcalc_core::SeriesData = serde_json::from_value(v["data"].clone()).unwrap();
    let ring = opcalc_core::Ring::morava_k(3, 2).unwrap();
    let series = opcalc_core::Series::from_data(&ring, &data).unwrap();
    assert_eq!(series.to_string(), v["series"].as_str().unwrap());
    assert_eq!(serde_json::to_value(series.to_data()).unwrap(), v["data"]);
}

#[test]
fn rwcheck_passes_for_k1() {
    let v = stdout_json(&["coop", "rwcheck", "--p", "3", "--n", "1", "--json"]);
    assert_eq!(v["pass"], true);
    assert_eq!(v["lhs_leading"]["string"], "v1*b1");
    assert_eq!(v["rhs_leading"]["string"], "b1^3*[vF1]");
}

#[test]
fn rwcheck_needs_the_multiplier_at_height_two() {
    let v = stdout_json(&["coop", "rwcheck", "--p", "3", "--n", "2", "--json"]);
    assert_eq!(v["pass"], true);
    assert_eq!(v["multiplier"], "b1^3");
    assert_eq!(v["difference_after_rewriting"], "0");
}

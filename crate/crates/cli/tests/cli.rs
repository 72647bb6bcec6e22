//! End-to-end tests of the `bethe` binary: exit codes, report shape,
//! determinism, and the documented skip behavior.

use std::path::Path;
use std::process::{Command, Output};

fn bethe(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bethe"))
        .args(args)
        .output()
        .expect("the binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout is UTF-8")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("stderr is UTF-8")
}

fn report_json(args: &[&str]) -> serde_json::Value {
    let out = bethe(args);
    assert!(
        out.status.success(),
        "report run failed: {}{}",
        stdout(&out),
        stderr(&out)
    );
    serde_json::from_str(&stdout(&out)).expect("report is valid JSON")
}

fn check_by_name<'a>(report: &'a serde_json::Value, name: &str) -> &'a serde_json::Value {
    report["checks"]
        .as_array()
        .expect("checks is an array")
        .iter()
        .find(|c| c["name"] == name)
        .unwrap_or_else(|| panic!("no check named {name}"))
}

#[test]
fn the_default_suite_passes_on_a_small_chain() {
    let out = bethe(&["verify", "--sites", "4", "--magnons", "2"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(
        text.contains("summary: 12 checks, 12 passed, 0 failed, 0 skipped"),
        "unexpected summary in:\n{text}"
    );
}

#[test]
fn reports_are_deterministic_modulo_wall_times() {
    let args = ["report", "--sites", "4", "--magnons", "2", "--seed", "11"];
    let mut first = report_json(&args);
    let mut second = report_json(&args);
    for report in [&mut first, &mut second] {
        for check in report["checks"].as_array_mut().expect("array") {
            check["wall_ms"] = 0.into();
        }
    }
    assert_eq!(first, second);
}

#[test]
fn report_json_survives_a_parse_and_reserialize_round_trip() {
    let out = bethe(&["report", "--sites", "4", "--magnons", "1", "--seed", "5"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let value: serde_json::Value = serde_json::from_str(&text).expect("valid JSON");
    let again = serde_json::to_string_pretty(&value).expect("serializes") + "\n";
    assert_eq!(text, again);
}

#[test]
fn the_report_carries_schema_tool_and_config_echo() {
    let report = report_json(&["report", "--sites", "4", "--magnons", "2", "--seed", "9"]);
    assert_eq!(report["schema"], "bethe-report/1");
    assert_eq!(report["tool"]["name"], "bethe");
    assert_eq!(report["config"]["sites"], 4);
    assert_eq!(report["config"]["magnons"], 2);
    assert_eq!(report["config"]["seed"], 9);
    assert_eq!(report["config"]["variant"], "rational");
    assert_eq!(report["config"]["eta"], serde_json::json!([1.0, 0.0]));
    assert_eq!(report["summary"]["total"], 12);
}

#[test]
fn complex_values_serialize_as_real_imaginary_pairs() {
    let report = report_json(&[
        "report",
        "--sites",
        "4",
        "--magnons",
        "2",
        "--checks",
        "slavnov",
    ]);
    let slavnov = check_by_name(&report, "slavnov");
    let sp = slavnov["values"]["scalar_product"]
        .as_array()
        .expect("scalar_product is an array");
    assert_eq!(sp.len(), 2);
    assert!(sp[0].is_f64() && sp[1].is_f64());
    let roots = slavnov["values"]["roots"].as_array().expect("roots array");
    assert_eq!(roots.len(), 2);
    assert_eq!(roots[0].as_array().expect("pair").len(), 2);
}

#[test]
fn checks_appear_in_name_order() {
    let report = report_json(&["report", "--sites", "4", "--magnons", "2"]);
    let names: Vec<&str> = report["checks"]
        .as_array()
        .expect("array")
        .iter()
        .map(|c| c["name"].as_str().expect("name"))
        .collect();
    let mut sorted = names.clone();
    sorted.sort_unstable();
    assert_eq!(names, sorted);
    assert_eq!(names.len(), 12);
}

#[test]
fn a_single_check_reproduces_the_full_run_numbers() {
    let full = report_json(&["report", "--sites", "4", "--magnons", "2", "--seed", "13"]);
    let alone = report_json(&[
        "report",
        "--sites",
        "4",
        "--magnons",
        "2",
        "--seed",
        "13",
        "--checks",
        "gaudin",
    ]);
    assert_eq!(
        check_by_name(&full, "gaudin")["defect"],
        check_by_name(&alone, "gaudin")["defect"]
    );
}

#[test]
fn tsv_reports_hold_one_row_per_check_plus_a_header() {
    let out = bethe(&[
        "report",
        "--sites",
        "4",
        "--magnons",
        "2",
        "--format",
        "tsv",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 13);
    assert!(lines[0].starts_with("check\tstatus\tdefect\ttolerance"));
    for line in &lines[1..] {
        assert_eq!(line.split('\t').count(), 7, "bad row: {line}");
    }
}

#[test]
fn an_impossible_tolerance_fails_the_run() {
    let out = bethe(&[
        "verify",
        "--checks",
        "yang-baxter",
        "--tol",
        "yang-baxter=1e-300",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("fail"));
}

#[test]
fn configuration_errors_exit_with_code_two() {
    for args in [
        vec!["verify", "--sites", "25"],
        vec!["verify", "--checks", "nonsense"],
        vec!["verify", "--eta", "0,0"],
        vec!["verify", "--eta", "abc"],
        vec!["verify", "--tol", "yang-baxter=-1"],
        vec!["norm", "--variant", "trigonometric", "--eta", "0.3,0.1"],
    ] {
        let out = bethe(&args);
        assert_eq!(
            out.status.code(),
            Some(2),
            "args {args:?}: {}",
            stderr(&out)
        );
        assert!(stderr(&out).starts_with("error:"), "args {args:?}");
    }
}

#[test]
fn oversized_chains_skip_the_dense_checks_but_still_pass() {
    let report = report_json(&[
        "report",
        "--sites",
        "13",
        "--magnons",
        "2",
        "--checks",
        "rtt,slavnov,yang-baxter",
    ]);
    assert_eq!(check_by_name(&report, "rtt")["status"], "skipped: cap");
    assert_eq!(check_by_name(&report, "slavnov")["status"], "skipped: cap");
    assert_eq!(check_by_name(&report, "yang-baxter")["status"], "pass");
    assert_eq!(report["summary"]["skipped"], 2);
}

#[test]
fn an_empty_check_list_yields_an_empty_passing_report() {
    let out = bethe(&["report", "--checks", ""]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("valid JSON");
    assert_eq!(report["summary"]["total"], 0);
    assert_eq!(report["checks"].as_array().expect("array").len(), 0);
}

#[test]
fn trigonometric_runs_skip_the_rational_closed_forms() {
    let report = report_json(&[
        "report",
        "--variant",
        "trigonometric",
        "--eta",
        "0.3,0.1",
        "--sites",
        "4",
        "--magnons",
        "2",
    ]);
    for name in ["slavnov", "gaudin", "scalar-sum", "phi-m", "residue"] {
        assert_eq!(
            check_by_name(&report, name)["status"],
            "skipped: config",
            "{name}"
        );
    }
    for name in [
        "yang-baxter",
        "rtt",
        "commutation",
        "factorizing",
        "f-basis",
    ] {
        assert_eq!(check_by_name(&report, name)["status"], "pass", "{name}");
    }
}

#[test]
fn homogeneous_chains_skip_what_needs_distinct_inhomogeneities() {
    let report = report_json(&[
        "report",
        "--xi",
        "homogeneous",
        "--sites",
        "4",
        "--magnons",
        "2",
    ]);
    for name in ["factorizing", "f-basis", "orthogonality"] {
        assert_eq!(
            check_by_name(&report, name)["status"],
            "skipped: config",
            "{name}"
        );
    }
    assert_eq!(report["summary"]["failed"], 0);
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().expect("tempdir");
    let cfg_path = dir.path().join("run.json");
    std::fs::write(
        &cfg_path,
        r#"{ "sites": 4, "magnons": 1, "seed": 3, "checks": ["yang-baxter"] }"#,
    )
    .expect("config written");
    let report = report_json(&[
        "report",
        "--config",
        cfg_path.to_str().expect("utf-8 path"),
        "--magnons",
        "2",
    ]);
    assert_eq!(report["config"]["sites"], 4);
    assert_eq!(report["config"]["magnons"], 2);
    assert_eq!(report["config"]["seed"], 3);
    assert_eq!(report["checks"].as_array().expect("array").len(), 1);
}

#[test]
fn the_out_flag_writes_the_report_to_a_file() {
    let dir = tempfile::tempdir().expect("tempdir");
    let path = dir.path().join("report.json");
    let out = bethe(&[
        "verify",
        "--sites",
        "4",
        "--magnons",
        "1",
        "--checks",
        "yang-baxter",
        "--out",
        path.to_str().expect("utf-8 path"),
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("summary: 1 checks"));
    let written: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).expect("file written"))
            .expect("valid JSON");
    assert_eq!(written["summary"]["passed"], 1);
    assert!(Path::new(&path).exists());
}

#[test]
fn unknown_config_file_keys_are_rejected() {
    let dir = tempfile::tempdir().expect("tempdir");
    let cfg_path = dir.path().join("bad.json");
    std::fs::write(&cfg_path, r#"{ "sites": 4, "sittes": 6 }"#).expect("config written");
    let out = bethe(&["verify", "--config", cfg_path.to_str().expect("utf-8 path")]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn the_scalar_product_demo_cross_checks_every_form() {
    let out = bethe(&["scalar-product", "--sites", "6", "--magnons", "2"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    for needle in ["Bethe roots", "brute force", "determinant", "partition sum"] {
        assert!(text.contains(needle), "missing {needle:?} in:\n{text}");
    }
}

#[test]
fn the_bae_demo_lists_every_regular_root_set() {
    let out = bethe(&["bae", "--sites", "6", "--magnons", "2"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(
        text.contains("9 regular root sets in sector M = 2"),
        "{text}"
    );
}

#[test]
fn the_norm_demo_matches_determinant_against_oracle() {
    let out = bethe(&["norm", "--sites", "6", "--magnons", "2"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("relative defect"), "{text}");
}

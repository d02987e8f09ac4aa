//! End-to-end tests of the binary: exit codes, output formats, overrides,
//! and report determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn minty() -> Command {
    Command::new(env!("CARGO_BIN_EXE_minty"))
}

fn write_spec(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn run_spec(spec: &Path, out: &Path, extra: &[&str]) -> Output {
    minty()
        .arg("run")
        .arg(spec)
        .arg("--out")
        .arg(out)
        .args(extra)
        .output()
        .unwrap()
}

fn exit_code(o: &Output) -> i32 {
    o.status.code().expect("process exited normally")
}

const SKEW_OP: &str =
    r#""skew": { "dim": 2, "variant": "linear", "matrix": [[0.0, -1.0], [1.0, 0.0]] }"#;

#[test]
fn successful_run_writes_report_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(
        dir.path(),
        "ok.json",
        &format!(
            r#"{{ "operators": {{ {SKEW_OP} }},
                 "checks": [ {{ "check": "lipschitz", "operator": "skew", "seed": 3,
                                "expect": {{ "verdict": "holds_on_samples" }} }} ] }}"#
        ),
    );
    let out = dir.path().join("report.json");
    let o = run_spec(&spec, &out, &[]);
    assert_eq!(exit_code(&o), 0, "stderr: {}", String::from_utf8_lossy(&o.stderr));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report["summary"]["checks_run"], 1);
    assert_eq!(report["summary"]["expectations_failed"], 0);
    assert_eq!(report["results"][0]["check"], "lipschitz");
    assert_eq!(report["results"][0]["expectation"]["status"], "met");
}

#[test]
fn failed_expectation_exits_one_but_still_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(
        dir.path(),
        "fail.json",
        &format!(
            r#"{{ "operators": {{ {SKEW_OP} }},
                 "checks": [ {{ "check": "check_firm", "operator": "skew", "seed": 3,
                                "expect": {{ "verdict": "violated" }} }} ] }}"#
        ),
    );
    let out = dir.path().join("report.json");
    let o = run_spec(&spec, &out, &[]);
    assert_eq!(exit_code(&o), 1);
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report["summary"]["expectations_failed"], 1);
    assert_eq!(report["results"][0]["expectation"]["status"], "failed");
}

#[test]
fn malformed_json_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), "bad.json", "{ not json");
    let o = run_spec(&spec, &dir.path().join("r.json"), &[]);
    assert_eq!(exit_code(&o), 2);
}

#[test]
fn unknown_reference_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(
        dir.path(),
        "ref.json",
        r#"{ "checks": [ { "check": "lipschitz", "operator": "ghost", "seed": 1 } ] }"#,
    );
    let o = run_spec(&spec, &dir.path().join("r.json"), &[]);
    assert_eq!(exit_code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("ghost"));
}

#[test]
fn map_cycle_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(
        dir.path(),
        "cycle.json",
        r#"{ "maps": { "a": { "kind": "complement", "of": "b" },
                       "b": { "kind": "reflect", "of": "a" } },
             "checks": [ { "check": "lipschitz", "map": "a", "seed": 1 } ] }"#,
    );
    let o = run_spec(&spec, &dir.path().join("r.json"), &[]);
    assert_eq!(exit_code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("cycle"));
}

#[test]
fn unknown_check_id_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(
        dir.path(),
        "unknown.json",
        &format!(
            r#"{{ "operators": {{ {SKEW_OP} }},
                 "checks": [ {{ "check": "no_such_check", "operator": "skew", "seed": 1 }} ] }}"#
        ),
    );
    let o = run_spec(&spec, &dir.path().join("r.json"), &[]);
    assert_eq!(exit_code(&o), 3);
}

#[test]
fn non_monotone_operator_exits_four() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(
        dir.path(),
        "neg.json",
        r#"{ "operators": { "neg": { "dim": 2, "variant": "linear",
                                     "matrix": [[-1.0, 0.0], [0.0, -1.0]] } },
             "checks": [ { "check": "lipschitz", "operator": "neg", "seed": 1 } ] }"#,
    );
    let o = run_spec(&spec, &dir.path().join("r.json"), &[]);
    assert_eq!(exit_code(&o), 4);
}

#[test]
fn dimension_mismatch_exits_four() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(
        dir.path(),
        "dim.json",
        &format!(
            r#"{{ "operators": {{ {SKEW_OP} }},
                 "checks": [ {{ "check": "surjectivity", "operator": "skew", "seed": 1,
                                "targets": [[1.0, 0.0, 0.0]] }} ] }}"#
        ),
    );
    let o = run_spec(&spec, &dir.path().join("r.json"), &[]);
    assert_eq!(exit_code(&o), 4);
}

#[test]
fn missing_seed_is_a_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(
        dir.path(),
        "noseed.json",
        &format!(
            r#"{{ "operators": {{ {SKEW_OP} }},
                 "checks": [ {{ "check": "lipschitz", "operator": "skew" }} ] }}"#
        ),
    );
    let o = run_spec(&spec, &dir.path().join("r.json"), &[]);
    assert_eq!(exit_code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("seed"));
}

#[test]
fn text_format_renders_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(
        dir.path(),
        "text.json",
        &format!(
            r#"{{ "operators": {{ {SKEW_OP} }},
                 "maps": {{ "neg": {{ "kind": "linear", "matrix": [[-1.0, 0.0], [0.0, -1.0]] }} }},
                 "checks": [ {{ "check": "check_firm", "map": "neg", "seed": 5,
                                "expect": {{ "verdict": "violated" }} }} ] }}"#
        ),
    );
    let out = dir.path().join("report.txt");
    let o = run_spec(&spec, &out, &["--format", "text"]);
    assert_eq!(exit_code(&o), 0);
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains("check_firm on map:neg"));
    assert!(text.contains("violated"));
    assert!(text.contains("expectation met"));
}

#[test]
fn picard_csv_has_residual_per_iteration() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("trace.csv");
    let spec = write_spec(
        dir.path(),
        "csv.json",
        &format!(
            r#"{{ "operators": {{
                    "id_op": {{ "dim": 2, "variant": "linear", "matrix": [[1.0, 0.0], [0.0, 1.0]] }},
                    "zero_op": {{ "dim": 2, "variant": "linear", "matrix": [[0.0, 0.0], [0.0, 0.0]] }} }},
                 "maps": {{ "dr": {{ "kind": "douglas_rachford", "a": "id_op", "b": "zero_op" }} }},
                 "checks": [ {{ "check": "picard", "map": "dr", "seed": 1, "start": [8.0, 0.0],
                                "max_iter": 50, "csv": {:?},
                                "expect": {{ "converged": true }} }} ] }}"#,
            csv_path.to_str().unwrap()
        ),
    );
    let o = run_spec(&spec, &dir.path().join("r.json"), &[]);
    assert_eq!(exit_code(&o), 0, "stderr: {}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(&csv_path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "iteration,residual,x0,x1");
    assert_eq!(lines.next().unwrap(), "0,,8,0");
    assert_eq!(lines.next().unwrap(), "1,4,4,0");
    let rows = csv.lines().count();
    // header + start + one row per step
    let report: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("r.json")).unwrap(),
    )
    .unwrap();
    let used = report["results"][0]["outcome"]["iterations_used"].as_u64().unwrap() as usize;
    assert_eq!(rows, used + 2);
}

#[test]
fn out_flag_overrides_spec_output_section() {
    let dir = tempfile::tempdir().unwrap();
    let spec_output = dir.path().join("from_spec.json");
    let spec = write_spec(
        dir.path(),
        "override.json",
        &format!(
            r#"{{ "operators": {{ {SKEW_OP} }},
                 "checks": [ {{ "check": "lipschitz", "operator": "skew", "seed": 3 }} ],
                 "output": {{ "path": {:?}, "format": "json" }} }}"#,
            spec_output.to_str().unwrap()
        ),
    );
    let out = dir.path().join("cli_override.json");
    let o = run_spec(&spec, &out, &[]);
    assert_eq!(exit_code(&o), 0);
    assert!(out.exists());
    assert!(!spec_output.exists());
}

#[test]
fn stdout_gets_report_when_no_output_is_configured() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(
        dir.path(),
        "stdout.json",
        &format!(
            r#"{{ "operators": {{ {SKEW_OP} }},
                 "checks": [ {{ "check": "lipschitz", "operator": "skew", "seed": 3 }} ] }}"#
        ),
    );
    let o = minty().arg("run").arg(&spec).output().unwrap();
    assert_eq!(exit_code(&o), 0);
    let report: serde_json::Value =
        serde_json::from_slice(&o.stdout).expect("stdout is the JSON report");
    assert_eq!(report["summary"]["checks_run"], 1);
}

#[test]
fn out_dash_forces_stdout_over_spec_output() {
    let dir = tempfile::tempdir().unwrap();
    let spec_output = dir.path().join("from_spec.json");
    let spec = write_spec(
        dir.path(),
        "dash.json",
        &format!(
            r#"{{ "operators": {{ {SKEW_OP} }},
                 "checks": [ {{ "check": "lipschitz", "operator": "skew", "seed": 3 }} ],
                 "output": {{ "path": {:?}, "format": "json" }} }}"#,
            spec_output.to_str().unwrap()
        ),
    );
    let o = minty().arg("run").arg(&spec).arg("--out").arg("-").output().unwrap();
    assert_eq!(exit_code(&o), 0);
    assert!(!spec_output.exists());
    let report: serde_json::Value =
        serde_json::from_slice(&o.stdout).expect("stdout carries the report");
    assert_eq!(report["summary"]["checks_run"], 1);
}

#[test]
fn list_checks_is_stable_and_complete() {
    let a = minty().arg("list-checks").output().unwrap();
    let b = minty().arg("list-checks").output().unwrap();
    assert_eq!(exit_code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    for id in [
        "check_firm",
        "lipschitz",
        "banach_graph",
        "strong_mono",
        "cocoercivity",
        "strict_nonexpansive",
        "injective",
        "strict_firm",
        "paramonotone",
        "cyclic_firm",
        "rectangular",
        "uniform_modulus",
        "duality_suite",
        "surjectivity",
        "moreau",
        "reflected_contraction",
        "strong_mono_reflected",
        "picard",
        "fixed_point_evidence",
        "linear",
        "affine",
        "isometry",
        "projection",
    ] {
        assert!(text.contains(id), "missing check id {id}");
    }
}

#[test]
fn version_prints_tool_version() {
    let o = minty().arg("version").output().unwrap();
    assert_eq!(exit_code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("minty "));
    assert!(text.contains(env!("CARGO_PKG_VERSION")));
}

#[test]
fn jobs_flag_does_not_change_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(
        dir.path(),
        "jobs.json",
        &format!(
            r#"{{ "operators": {{ {SKEW_OP} }},
                 "checks": [ {{ "check": "check_firm", "operator": "skew", "seed": 9, "count": 400 }},
                             {{ "check": "duality_suite", "operator": "skew", "seed": 9, "count": 120 }} ] }}"#
        ),
    );
    let out1 = dir.path().join("r1.json");
    let out2 = dir.path().join("r2.json");
    let o1 = run_spec(&spec, &out1, &["--jobs", "1"]);
    let o2 = run_spec(&spec, &out2, &["--jobs", "4"]);
    assert_eq!(exit_code(&o1), 0);
    assert_eq!(exit_code(&o2), 0);
    let strip = |p: &Path| {
        let mut v: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap();
        v.as_object_mut().unwrap().remove("timing");
        serde_json::to_string(&v).unwrap()
    };
    assert_eq!(strip(&out1), strip(&out2));
}

#[test]
fn report_is_atomic_no_partial_file_under_final_name() {
    // The writer goes through a sibling temp file; after a successful run the
    // temp name must be gone and the target parseable.
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(
        dir.path(),
        "atomic.json",
        &format!(
            r#"{{ "operators": {{ {SKEW_OP} }},
                 "checks": [ {{ "check": "lipschitz", "operator": "skew", "seed": 3 }} ] }}"#
        ),
    );
    let out = dir.path().join("report.json");
    let o = run_spec(&spec, &out, &[]);
    assert_eq!(exit_code(&o), 0);
    assert!(!dir.path().join("report.json.tmp").exists());
    let _: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
}

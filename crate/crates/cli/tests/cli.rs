//! End-to-end tests of the job-spec surface and the `wcoball` binary.

use std::process::Command;

use serde_json::{json, Value};
use wcoball_cli::checks::run_job;
use wcoball_cli::jobspec::{parse_spec, serialize_job};

fn dirichlet_symmetric_job() -> Value {
    json!({
        "space": {"kind": "dirichlet", "dim": 2},
        "psi": {"constant": [2.0, 0.0]},
        "phi": {
            "a": [[[0.3, 0.0], [0.1, 0.0]], [[0.1, 0.0], [0.5, 0.0]]],
            "b": [[0.0, 0.0], [0.0, 0.0]],
            "c": [[0.0, 0.0], [0.0, 0.0]],
            "d": [1.0, 0.0]
        },
        "checks": ["classify_dirichlet_J", "matrix_symmetry"],
        "degree_cap": 8
    })
}

#[test]
fn complex_scalars_parse_from_pairs_and_bare_reals() {
    let spec = json!({
        "space": {"kind": "hardy", "dim": 1},
        "psi": {"constant": 0.5},
        "phi": {"a": [[1.0]], "b": [0.0], "c": [0.0], "d": 1.0}
    });
    let jobs = parse_spec(spec.to_string().as_bytes()).unwrap();
    assert_eq!(jobs.len(), 1);
    match &jobs[0].psi {
        wcoball::space::WeightSpec::Constant(c) => {
            assert_eq!(*c, num_complex::Complex64::new(0.5, 0.0))
        }
        other => panic!("unexpected weight {other:?}"),
    }
}

#[test]
fn missing_space_reports_pointer_path() {
    let spec = json!({
        "psi": {"constant": 1.0},
        "phi": {"a": [[1.0]], "b": [0.0], "c": [0.0], "d": 1.0}
    });
    let err = parse_spec(spec.to_string().as_bytes()).unwrap_err();
    assert_eq!(err.path, "/space");
}

#[test]
fn unknown_check_reports_pointer_path() {
    let mut spec = dirichlet_symmetric_job();
    spec["checks"] = json!(["classify_dirichlet_J", "bogus"]);
    let err = parse_spec(spec.to_string().as_bytes()).unwrap_err();
    assert_eq!(err.path, "/checks/1");
}

#[test]
fn unknown_fields_are_rejected() {
    let mut spec = dirichlet_symmetric_job();
    spec["extra"] = json!(1);
    let err = parse_spec(spec.to_string().as_bytes()).unwrap_err();
    assert_eq!(err.path, "/extra");
}

#[test]
fn round_trip_preserves_jobs() {
    let mut spec = dirichlet_symmetric_job();
    spec["conjugation"] = json!({"jcu": {"u": [[[0.0,0.0],[1.0,0.0]],[[1.0,0.0],[0.0,0.0]]]}});
    spec["seed"] = json!(12345);
    spec["tolerances"] = json!({"matrix_symmetry": 1e-8});
    let jobs = parse_spec(spec.to_string().as_bytes()).unwrap();
    let serialized = serialize_job(&jobs[0]).to_string();
    let back = parse_spec(serialized.as_bytes()).unwrap();
    assert_eq!(jobs, back);
}

#[test]
fn reports_are_deterministic_modulo_timing() {
    let jobs = parse_spec(dirichlet_symmetric_job().to_string().as_bytes()).unwrap();
    let strip = |report: &wcoball_cli::checks::JobReport| {
        let mut v = serde_json::to_value(report).unwrap();
        for check in v["checks"].as_array_mut().unwrap() {
            check.as_object_mut().unwrap().remove("elapsed_ms");
        }
        v
    };
    let a = strip(&run_job(&jobs[0], 0).unwrap());
    let b = strip(&run_job(&jobs[0], 0).unwrap());
    assert_eq!(a.to_string(), b.to_string());
}

#[test]
fn classify_job_passes_for_symmetric_linear_symbol() {
    let jobs = parse_spec(dirichlet_symmetric_job().to_string().as_bytes()).unwrap();
    let report = run_job(&jobs[0], 0).unwrap();
    assert!(report.passed, "{report:?}");
    let classify = &report.checks[0];
    assert!(classify.verdict.as_ref().unwrap().holds);
    let residual = report.checks[1].residual.unwrap();
    assert!(residual < 1e-12, "residual {residual}");
}

#[test]
fn jw_affine_job_passes_for_eigendirection_instance() {
    let spec = json!({
        "space": {"kind": "hardy", "dim": 2},
        "psi": {"constant": 1.0},
        "phi": {
            "a": [[0.5, 0.0], [0.0, 0.5]],
            "b": [0.25, 0.0],
            "c": [0.0, 0.0],
            "d": 1.0
        },
        "checks": ["jw_affine"]
    });
    let jobs = parse_spec(spec.to_string().as_bytes()).unwrap();
    let report = run_job(&jobs[0], 0).unwrap();
    assert!(report.passed, "{report:?}");
    let verdict = report.checks[0].verdict.as_ref().unwrap();
    let kernel_condition = verdict
        .conditions
        .iter()
        .find(|c| c.name == "kernel symmetry residual")
        .expect("kernel residual condition");
    assert!(kernel_condition.slack >= 0.0);
}

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_wcoball"))
}

#[test]
fn binary_classify_exits_zero_on_pass() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("job.json");
    std::fs::write(&path, dirichlet_symmetric_job().to_string()).unwrap();
    let output = binary().arg("classify").arg(&path).output().unwrap();
    assert!(output.status.success(), "{output:?}");
    let text = String::from_utf8(output.stdout).unwrap();
    assert!(text.contains("classify_dirichlet_J"), "{text}");
    assert!(text.contains("overall: PASS"), "{text}");
}

#[test]
fn binary_classify_exits_one_on_failed_check() {
    let mut spec = dirichlet_symmetric_job();
    // break symmetry of the linear part
    spec["phi"]["a"][1][0] = json!([0.2, 0.0]);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("job.json");
    std::fs::write(&path, spec.to_string()).unwrap();
    let output = binary().arg("classify").arg(&path).output().unwrap();
    assert_eq!(output.status.code(), Some(1), "{output:?}");
}

#[test]
fn binary_rejects_bad_input_with_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("job.json");
    std::fs::write(&path, "{\"nope\": 1}").unwrap();
    let output = binary().arg("classify").arg(&path).output().unwrap();
    assert_eq!(output.status.code(), Some(2), "{output:?}");
    let err = String::from_utf8(output.stderr).unwrap();
    assert!(err.contains("/nope"), "{err}");
}

#[test]
fn binary_build_matrix_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let spec_path = dir.path().join("job.json");
    let matrix_path = dir.path().join("matrix.json");
    std::fs::write(&spec_path, dirichlet_symmetric_job().to_string()).unwrap();
    let output = binary()
        .arg("build-matrix")
        .arg(&spec_path)
        .arg("--out")
        .arg(&matrix_path)
        .arg("--degree")
        .arg("5")
        .output()
        .unwrap();
    assert!(output.status.success(), "{output:?}");
    let text = std::fs::read_to_string(&matrix_path).unwrap();
    let export: wcoball::operator::MatrixExport = serde_json::from_str(&text).unwrap();
    assert_eq!(export.ordering, "grlex");
    assert_eq!(export.d, 5);
    let compression = wcoball::operator::Compression::from_export(&export).unwrap();
    assert_eq!(compression.dim(), 21);
    // bit-exact round trip through the wire format
    let again = serde_json::to_string(&compression.export()).unwrap();
    let back: wcoball::operator::MatrixExport = serde_json::from_str(&again).unwrap();
    assert_eq!(export, back);
}

#[test]
fn binary_check_symmetry_json_report() {
    let mut spec = dirichlet_symmetric_job();
    spec["checks"] = json!([]);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("job.json");
    std::fs::write(&path, spec.to_string()).unwrap();
    let output = binary()
        .arg("check-symmetry")
        .arg(&path)
        .arg("--format")
        .arg("json")
        .output()
        .unwrap();
    assert!(output.status.success(), "{output:?}");
    let report: Value = serde_json::from_slice(&output.stdout).unwrap();
    assert_eq!(report["passed"], json!(true));
    let checks = report["jobs"][0]["checks"].as_array().unwrap();
    let names: Vec<&str> = checks.iter().map(|c| c["check"].as_str().unwrap()).collect();
    assert_eq!(names, vec!["matrix_symmetry", "kernel_symmetry"]);
}

#[test]
fn binary_suite_prints_all_criteria() {
    let output = binary().arg("suite").output().unwrap();
    let text = String::from_utf8(output.stdout).unwrap();
    for id in 1..=9 {
        assert!(text.contains(&format!("criterion {id} (")), "missing criterion {id}: {text}");
    }
    let all_passed = !text.contains("FAIL");
    assert_eq!(output.status.success(), all_passed, "{text}");
    assert!(text.contains(&format!("suite: {}", if all_passed { "PASS" } else { "FAIL" })));
}

use std::process::{Command, Output};

use serde_json::Value;

fn nkverify(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nkverify")).args(args).env_remove("NKVERIFY_SEED").output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("report is JSON")
}

fn check<'a>(v: &'a Value, id: &str) -> &'a Value {
    v["checks"].as_array().unwrap().iter().find(|c| c["id"] == id).unwrap_or_else(|| panic!("no {id}"))
}

#[test]
fn structure_passes_and_reports_schema() {
    let out = nkverify(&["structure", "--samples", "100", "--g-samples", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["suite"], "structure");
    assert_eq!(v["status"], "pass");
    let ids: Vec<&str> = v["checks"].as_array().unwrap().iter().map(|c| c["id"].as_str().unwrap()).collect();
    let mut sorted = ids.clone();
    sorted.sort_unstable();
    assert_eq!(ids, sorted);
    for c in v["checks"].as_array().unwrap() {
        for key in ["id", "status", "max_residual", "tolerance", "samples", "seed", "elapsed_ms", "details"] {
            assert!(c.get(key).is_some(), "{key} missing");
        }
        assert!(c["elapsed_ms"].is_null());
        assert_eq!(c["seed"], 7);
    }
}

#[test]
fn impossible_tolerance_fails_with_finite_residuals() {
    let out = nkverify(&["structure", "--samples", "50", "--g-samples", "2", "--tol", "1e-30"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["status"], "fail");
    for c in v["checks"].as_array().unwrap() {
        assert!(c["max_residual"].as_f64().unwrap().is_finite());
        assert!((c["tolerance"].as_f64().unwrap() / 1e-30 - 1.0).abs() < 1e-12);
    }
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(nkverify(&["lagrangian", "--example", "no-such"]).status.code(), Some(2));
    assert_eq!(nkverify(&["proof", "--trials", "0"]).status.code(), Some(2));
    assert_eq!(nkverify(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(nkverify(&["structure", "--tol", "-1"]).status.code(), Some(2));
    assert_eq!(nkverify(&["fit", "/nonexistent/tensor.json"]).status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("bad.json");
    std::fs::write(&manifest, r#"{"example": "diagonal", "rotation": 3}"#).unwrap();
    assert_eq!(nkverify(&["lagrangian", "--manifest", manifest.to_str().unwrap()]).status.code(), Some(2));

    let tensor = dir.path().join("t.json");
    std::fs::write(
        &tensor,
        r#"{"n":3,"components":{"111":1,"112":0,"113":0,"122":0,"123":0,"133":0,"222":0,"223":0,"233":0}}"#,
    )
    .unwrap();
    let out = nkverify(&["fit", tensor.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("\"333\""));
}

#[test]
fn twisted_control_skips_downstream() {
    let out = nkverify(&["lagrangian", "--example", "twisted-control", "--grid", "2"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(check(&v, "lagrangian.twisted-control.is_lagrangian")["status"], "fail");
    for s in ["minimality", "cubic_symmetry", "angle_sum", "frame_formula", "codazzi"] {
        assert_eq!(check(&v, &format!("lagrangian.twisted-control.{s}"))["status"], "skip");
    }
}

#[test]
fn examples_and_manifest_pass() {
    let out = nkverify(&["lagrangian", "--example", "factor-left", "--example", "diagonal", "--grid", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(check(&v, "lagrangian.factor-left.minimality")["max_residual"].as_f64().unwrap() < 1e-5);

    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("m.json");
    std::fs::write(
        &manifest,
        r#"{"example": "factor-right", "isometry": {"left": [0.6, 0.8, 0, 0]}, "domain_rotation": [0.3, -0.2, 0.5]}"#,
    )
    .unwrap();
    let out = nkverify(&["lagrangian", "--manifest", manifest.to_str().unwrap(), "--grid", "2"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn exact_mode_skips_case3() {
    let out = nkverify(&["proof", "--trials", "4", "--mode", "exact"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(check(&v, "codazzi.case3")["status"], "skip");
    assert_eq!(check(&v, "codazzi.system1")["status"], "pass");
    assert_eq!(
        check(&v, "codazzi.system1")["details"]["clearing_factor_k2"],
        serde_json::json!({"a": "-5/12", "b": "0/1"})
    );
}

#[test]
fn fit_command() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("e1.json");
    std::fs::write(&path, nkverify::humfit::build_h_from_V(&[1.0, 0.0, 0.0]).to_json()).unwrap();
    let out = nkverify(&["fit", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let f = &check(&v, "humfit.fit")["details"]["fit"];
    assert_eq!(f["u1"], serde_json::json!([1.0, 0.0, 0.0]));
    assert!((f["lambda"].as_f64().unwrap() + 2.0).abs() < 1e-10);
    assert!((f["mu"].as_f64().unwrap() - 1.0).abs() < 1e-10);

    std::fs::write(&path, nkverify::humfit::CubicTensor::zero().to_json()).unwrap();
    let v = json(&nkverify(&["fit", path.to_str().unwrap()]));
    let f = &check(&v, "humfit.fit")["details"]["fit"];
    assert_eq!((f["lambda"].as_f64(), f["mu"].as_f64()), (Some(0.0), Some(0.0)));
}

#[test]
fn seed_environment_and_flags() {
    let out = Command::new(env!("CARGO_BIN_EXE_nkverify"))
        .args(["structure", "--samples", "10", "--g-samples", "1"])
        .env("NKVERIFY_SEED", "99")
        .output()
        .unwrap();
    assert_eq!(json(&out)["checks"][0]["seed"], 99);
    let out = Command::new(env!("CARGO_BIN_EXE_nkverify"))
        .args(["structure", "--samples", "10", "--g-samples", "1", "--seed", "5"])
        .env("NKVERIFY_SEED", "99")
        .output()
        .unwrap();
    assert_eq!(json(&out)["checks"][0]["seed"], 5);

    let timed = json(&nkverify(&["structure", "--samples", "10", "--g-samples", "1", "--timings"]));
    assert!(check(&timed, "structure.g_skew")["elapsed_ms"].is_u64());
}

#[test]
fn text_format_and_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.txt");
    let out = nkverify(&[
        "structure",
        "--samples",
        "10",
        "--g-samples",
        "1",
        "--format",
        "text",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let v = json(&nkverify(&["structure", "--samples", "10", "--g-samples", "1"]));
    for c in v["checks"].as_array().unwrap() {
        assert!(text.contains(c["id"].as_str().unwrap()));
    }
}

#[test]
fn reports_are_byte_identical() {
    for args in [
        &["structure", "--samples", "200", "--g-samples", "5", "--seed", "3"][..],
        &["proof", "--trials", "5", "--seed", "3"][..],
        &["lagrangian", "--grid", "2", "--seed", "3"][..],
    ] {
        let (a, b) = (nkverify(args), nkverify(args));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

//! End-to-end tests of the binary: exit-code contract, report shapes, and
//! byte determinism. Each test spawns the compiled executable the way a
//! user would.

use std::io::Write;
use std::process::{Command, Output};

fn delta3(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_delta3"))
        .args(args)
        // Isolate from tolerance overrides in the ambient environment.
        .env_remove("DELTA3_EPS_K")
        .env_remove("DELTA3_EPS_Q")
        .env_remove("DELTA3_TAU")
        .env_remove("DELTA3_FD_STEP")
        .output()
        .expect("binary should spawn")
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("no exit code (killed by signal?)")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON: {e}\n--- stdout ---\n{}",
            String::from_utf8_lossy(&out.stdout)
        )
    })
}

#[test]
fn sphere_check_passes_with_lambda_two() {
    let out = delta3(&[
        "check",
        "--surface",
        "sphere",
        "--radius",
        "2",
        "--grid",
        "6x6",
        "--output",
        "json",
        "--no-timestamp",
    ]);
    assert_eq!(exit_code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let json = stdout_json(&out);
    assert_eq!(json["fit"]["verdict"], "sphere-type");
    assert_eq!(json["passed"], true);
    let lambda = json["fit"]["lambda"].as_array().unwrap();
    for (i, entry) in lambda.iter().enumerate() {
        let expected = if i % 4 == 0 { 2.0 } else { 0.0 };
        let got = entry.as_f64().unwrap();
        assert!(
            (got - expected).abs() < 1e-8,
            "lambda[{i}] = {got}, expected {expected}"
        );
    }
    assert!(json["identity_max"].as_f64().unwrap() < 1e-10);
}

#[test]
fn quadric2_fit_exit_flips_with_expect() {
    let without = delta3(&["fit-lambda", "--surface", "quadric2", "--a", "1", "--b", "1"]);
    assert_eq!(
        exit_code(&without),
        1,
        "a surface with no consistent Λ must fail by default"
    );

    let with = delta3(&[
        "fit-lambda",
        "--surface",
        "quadric2",
        "--a",
        "1",
        "--b",
        "1",
        "--expect",
        "not-coordinate-finite-type",
    ]);
    assert_eq!(
        exit_code(&with),
        0,
        "--expect must turn the anticipated negative into a pass"
    );
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["fit-lambda"][..],
        &["fit-lambda", "--surface", "nosuch"][..],
        &["fit-lambda", "--config", "/nonexistent/surface.toml"][..],
        &["check", "--surface", "sphere", "--grid", "2x2"][..],
        &["check", "--surface", "sphere", "--tau", "-0.5"][..],
        &["verify-paper", "--criteria", "11"][..],
        &["ruled-coeffs", "--curves", "bogus"][..],
        &["ruled-coeffs", "--nodes", "4"][..],
        &["fit-lambda", "--surface", "sphere", "--output", "csv"][..],
    ] {
        let out = delta3(args);
        assert_eq!(
            exit_code(&out),
            2,
            "args {:?} should be a usage error; stderr: {}",
            args,
            String::from_utf8_lossy(&out.stderr)
        );
    }
}

#[test]
fn json_output_is_byte_deterministic() {
    let args = [
        "verify-paper",
        "--criteria",
        "1,6",
        "--seed",
        "11",
        "--output",
        "json",
        "--no-timestamp",
    ];
    let first = delta3(&args);
    let second = delta3(&args);
    assert_eq!(exit_code(&first), 0);
    assert_eq!(
        first.stdout, second.stdout,
        "identical config + seed must emit identical bytes"
    );
    let json = stdout_json(&first);
    assert_eq!(json["schema"], 1);
    assert_eq!(json["seed"], 11);
    assert_eq!(json["passed_all"], true);
    assert_eq!(json["criteria"].as_array().unwrap().len(), 2);
}

#[test]
fn verify_subset_reports_each_criterion() {
    let out = delta3(&["verify-paper", "--criteria", "1,6", "--seed", "3"]);
    assert_eq!(exit_code(&out), 0);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("criterion  1 [pass]"), "got: {text}");
    assert!(text.contains("criterion  6 [pass]"), "got: {text}");
    assert!(text.contains("overall: pass"), "got: {text}");
}

#[test]
fn toml_config_roundtrip() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    writeln!(
        file,
        "family = \"sphere\"\nname = \"test ball\"\n\n[params]\nradius = 0.5\n"
    )
    .unwrap();
    let path = file.path().to_str().unwrap();
    let out = delta3(&[
        "fit-lambda",
        "--config",
        path,
        "--output",
        "json",
        "--no-timestamp",
    ]);
    assert_eq!(exit_code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let json = stdout_json(&out);
    assert_eq!(json["surface"], "test ball", "config display name must be honored");
    assert_eq!(json["verdict"], "sphere-type");
}

#[test]
fn quadric_table_csv_contract() {
    let out = delta3(&["quadric-table", "--family", "paraboloid"]);
    assert_eq!(exit_code(&out), 0);
    let csv = String::from_utf8(out.stdout).unwrap();
    assert!(!csv.contains('\r'), "LF line endings only");
    let lines: Vec<&str> = csv.trim_end().split('\n').collect();
    assert_eq!(lines.len(), 10, "header + 9 sweep rows");
    assert_eq!(
        lines[0],
        "family,a,b,c,verdict,residual_max,identity_max,lambda_11,lambda_22,lambda_33"
    );
    for row in &lines[1..] {
        assert!(
            row.contains("not-coordinate-finite-type"),
            "every paraboloid must be rejected: {row}"
        );
    }
}

#[test]
fn quadric_table_json_carries_reading_note() {
    let out = delta3(&[
        "quadric-table",
        "--family",
        "paraboloid",
        "--output",
        "json",
        "--no-timestamp",
    ]);
    assert_eq!(exit_code(&out), 0);
    let json = stdout_json(&out);
    assert!(
        json["note"].as_str().unwrap().contains("chart height"),
        "the table must state which third-coordinate reading it used"
    );
    assert_eq!(json["rows"].as_array().unwrap().len(), 9);
}

#[test]
fn ruled_coeffs_reports_adjudication() {
    let out = delta3(&["ruled-coeffs", "--output", "json", "--no-timestamp"]);
    assert_eq!(exit_code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let json = stdout_json(&out);
    assert_eq!(json["pair"], "twisted");
    assert_eq!(json["adjudication"]["matched"], "3kn+3lr");
    assert_eq!(json["coefficients"].as_array().unwrap().len(), 5);
    assert!(json["max_deviation"].as_f64().unwrap() < 1e-2);
}

#[test]
fn env_overrides_reach_the_classifier() {
    // A tau far above the quadric's residual turns the verdict into a
    // constant-Λ one, proving the env var actually lands in the fit.
    let out = Command::new(env!("CARGO_BIN_EXE_delta3"))
        .args([
            "fit-lambda",
            "--surface",
            "quadric2",
            "--a",
            "1",
            "--b",
            "1",
            "--output",
            "json",
            "--no-timestamp",
        ])
        .env("DELTA3_TAU", "10.0")
        .output()
        .unwrap();
    assert_eq!(exit_code(&out), 0);
    let json = stdout_json(&out);
    assert_eq!(json["tau"], 10.0);
    assert_ne!(json["verdict"], "not-coordinate-finite-type");
}

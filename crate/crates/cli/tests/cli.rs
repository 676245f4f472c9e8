//! End-to-end checks of the binary: exit codes, JSON schema, table output.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qgarnier"))
}

#[test]
fn verify_pass_exit_zero_json_schema() {
    let out = bin()
        .args([
            "verify",
            "weyl-relations",
            "--n",
            "1",
            "--trials",
            "2",
            "--seed",
            "9",
            "--format",
            "json",
        ])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["suite"], "weyl-relations");
    assert_eq!(v["n"], 1);
    assert_eq!(v["seed"], 9);
    assert_eq!(v["precision"], 60);
    assert_eq!(v["overall"], true);
    let checks = v["checks"].as_array().unwrap();
    assert!(!checks.is_empty());
    for c in checks {
        assert!(c["id"].is_string());
        assert_eq!(c["status"], "pass");
        assert!(c["trials"].is_number());
        assert!(c["elapsed_ms"].is_number());
    }
}

#[test]
fn failing_check_exits_one() {
    // the q-Lauricella suite carries a deliberately red check
    let out = bin()
        .args([
            "verify",
            "lauricella",
            "--n",
            "1",
            "--trials",
            "1",
            "--format",
            "json",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["overall"], false);
}

#[test]
fn config_error_exits_two() {
    let out = bin()
        .args(["verify", "hgf-tauc", "--prec", "30", "--tol", "1e-45"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin().args(["verify", "no-such-suite"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn eval_prints_components_and_truncation() {
    let out = bin()
        .args([
            "eval", "x", "--n", "1", "--q", "1/2", "--a", "1/3,1/5", "--b", "1/7,1/2", "--c", "1/4",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(
        text.contains("x_1 = 8.0597886471266212386373053323703729946"),
        "{text}"
    );
    assert!(
        text.contains("x_2 = 1.0110765253651547647109194520065"),
        "{text}"
    );
    assert!(text.contains("truncation:"));
    assert!(text.contains("converged=true"));
}

#[test]
fn eval_rejects_bad_domain() {
    let out = bin()
        .args([
            "eval", "x", "--n", "1", "--q", "3/2", "--a", "1/3,1/5", "--b", "1/7,3/2", "--c", "1/4",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn matrix_prints_gamma_and_core() {
    let out = bin()
        .args([
            "matrix",
            "tau-c",
            "--n",
            "1",
            "--q",
            "1/2",
            "--a",
            "5/16,7/16",
            "--b",
            "11/16,1/2",
            "--c",
            "1/4",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("gamma: 0"));
    assert!(text.contains("core:"));
    // (b_1 - a_2 c)/(1 - c) = (11/16 - 7/64)/(3/4) = 0.770833...
    assert!(text.contains("7.708333333333333333333333"), "{text}");
}

#[test]
fn config_file_round_trip() {
    let dir = std::env::temp_dir().join(format!("qgarnier-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg_path = dir.join("config.toml");
    std::fs::write(
        &cfg_path,
        r#"
n = 1
trials = 2
seed = 5
suites = ["hgf-tauc"]

[params]
q = "1/2"
a = ["5/16", "7/16"]
b = ["11/16", "1/2"]
c = "1/4"
"#,
    )
    .unwrap();
    let report_path = dir.join("report.json");
    let out = bin()
        .args([
            "verify",
            "hgf-tauc",
            "--params",
            cfg_path.to_str().unwrap(),
            "--out",
            report_path.to_str().unwrap(),
            "--format",
            "json",
        ])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report_path).unwrap()).unwrap();
    assert_eq!(v["suite"], "hgf-tauc");
    assert_eq!(v["seed"], 5);
    assert_eq!(v["overall"], true);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn list_suites() {
    let out = bin().args(["verify", "all", "--list"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    for id in ["weyl-relations", "ladders", "proof-layer", "lauricella"] {
        assert!(text.contains(id));
    }
}

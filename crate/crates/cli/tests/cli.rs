//! End-to-end tests of the binary: exit codes, golden JSON output, config
//! validation, and the scenario output schema.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bvbounds"))
}

#[test]
fn missing_seed_is_a_config_error() {
    let out = bin()
        .args([
            "divergence",
            "--family",
            "iso-normal",
            "--theta",
            "0",
            "--theta-prime",
            "1",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--seed is mandatory"));
}

#[test]
fn divergence_golden_output() {
    let out = bin()
        .args([
            "--seed",
            "7",
            "divergence",
            "--family",
            "iso-normal",
            "--theta",
            "0",
            "--theta-prime",
            "1",
            "--kind",
            "chi2",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let golden = "{\n  \"kind\": \"Chi2\",\n  \"value\": 1.718281828459045,\n  \"provenance\": \"ClosedForm\",\n  \"std_error\": null,\n  \"error_bound\": null,\n  \"dominated\": true,\n  \"converged\": true\n}\n";
    assert_eq!(text, golden, "divergence JSON shape changed");
}

#[test]
fn unknown_config_keys_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "[family]\nkind = \"iso-normal\"\nbogus_key = 1\n").unwrap();
    let out = bin()
        .args(["--seed", "7", "--config", cfg.to_str().unwrap(), "bound"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(
        err.contains("bogus_key"),
        "diagnostic should name the field: {}",
        err
    );
}

#[test]
fn malformed_numbers_have_line_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "[family]\nkind = \"iso-normal\"\nsigma = \"oops\"\n").unwrap();
    let out = bin()
        .args(["--seed", "7", "--config", cfg.to_str().unwrap(), "bound"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3") || err.contains("sigma"), "{}", err);
}

#[test]
fn scenario_output_schema_and_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args([
            "--seed",
            "11",
            "--reps",
            "20000",
            "--out-dir",
            dir.path().to_str().unwrap(),
            "scenario",
            "--id",
            "bias-blowup",
            "--plots",
        ])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let json: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("bias-blowup.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(json["schema_version"], 1);
    assert_eq!(json["id"], "bias-blowup");
    assert_eq!(json["seed"], 11);
    for field in ["config", "constants", "bounds", "measurements", "verdicts"] {
        assert!(json.get(field).is_some(), "missing field {}", field);
    }
    let verdict = &json["verdicts"][0];
    for field in ["name", "pass", "detail"] {
        assert!(verdict.get(field).is_some());
    }
    assert!(dir.path().join("bias-blowup-constants.csv").exists());
    assert!(dir.path().join("bias-blowup-verdicts.csv").exists());
    let svg = std::fs::read_to_string(dir.path().join("bias-blowup-bias-ladder.svg")).unwrap();
    assert!(svg.starts_with("<svg"));
    // byte-identical rerun
    let dir2 = tempfile::tempdir().unwrap();
    let _ = bin()
        .args([
            "--seed",
            "11",
            "--reps",
            "20000",
            "--out-dir",
            dir2.path().to_str().unwrap(),
            "scenario",
            "--id",
            "bias-blowup",
        ])
        .output()
        .unwrap();
    assert_eq!(
        std::fs::read_to_string(dir.path().join("bias-blowup.json")).unwrap(),
        std::fs::read_to_string(dir2.path().join("bias-blowup.json")).unwrap(),
    );
}

#[test]
fn estimate_subcommand_reports_moments() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("est.toml");
    std::fs::write(
        &cfg,
        "[family]\nkind = \"iso-normal\"\nsigma = 1.0\n\n[params]\np = [0.0, 0.0, 0.0, 0.0]\n\n[estimator]\nkind = \"james-stein\"\n",
    )
    .unwrap();
    let out = bin()
        .args([
            "--seed",
            "5",
            "--reps",
            "20000",
            "--config",
            cfg.to_str().unwrap(),
            "estimate",
        ])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["reps"], 20000); // 32 equal batches of 625
    assert!(json["variance_sum"].as_f64().unwrap() > 0.0);
    assert_eq!(json["seed"], 5);
}

#[test]
fn verify_all_passes_and_prints_verdict_lines() {
    let out = bin()
        .args(["--seed", "7", "--reps", "20000", "verify-all"])
        .output()
        .unwrap();
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(
        out.status.success(),
        "stdout:\n{}\nstderr:\n{}",
        stdout,
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(stdout.contains("verify-all: ALL PASS"));
    assert!(stdout.lines().filter(|l| l.contains("PASS")).count() > 40);
    assert!(!stdout.contains("FAIL"));
}

#[test]
fn failing_scenario_precondition_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sc.toml");
    // 4γ + 1/log(n/s²) > 0.99 violates the sparse-sequence precondition
    std::fs::write(
        &cfg,
        "[scenario]\nid = \"sparse-sequence\"\nn = 100\ns = 2\ngamma = 0.3\n",
    )
    .unwrap();
    let out = bin()
        .args(["--seed", "7", "--config", cfg.to_str().unwrap(), "scenario"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bound_subcommand_emits_json_lines() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bound.toml");
    std::fs::write(
        &cfg,
        "[family]\nkind = \"iso-normal\"\nsigma = 1.0\n\n\
         [params]\np = [0.0]\nq = [1.0]\nlist = [[1.0], [2.0]]\n\n\
         [statistic]\nlinear = [1.0]\n\n\
         [bound]\ninequalities = [\"two-point\", \"multi-point-chi2\", \"mad\"]\n",
    )
    .unwrap();
    let out = bin()
        .args([
            "--seed",
            "7",
            "--config",
            cfg.to_str().unwrap(),
            "--out-dir",
            dir.path().to_str().unwrap(),
            "bound",
        ])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let stdout = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(
        lines.len(),
        8,
        "4 two-point + 3 multi-point variants + 1 mad"
    );
    for line in &lines {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["holds"], true, "{}", line);
        for field in [
            "id",
            "lhs",
            "rhs",
            "slack",
            "tolerance",
            "vacuous",
            "inputs_digest",
        ] {
            assert!(v.get(field).is_some());
        }
    }
    assert!(dir.path().join("bounds.jsonl").exists());
}

//! End-to-end runs of the binary: artifacts, determinism, exit codes, and
//! configuration-file handling.

use std::path::Path;
use std::process::Command;

fn yamabe() -> Command {
    Command::new(env!("CARGO_BIN_EXE_yamabe"))
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("reading {name}: {e}"))
}

fn temp_dir(tag: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("yamabe-cli-test-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    dir
}

#[test]
fn lambda_subcommand_reports_value() {
    let out = temp_dir("lambda");
    let output = yamabe()
        .args(["invariants", "lambda", "--n", "3", "--out"])
        .arg(&out)
        .output()
        .expect("binary runs");
    assert!(output.status.success());
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("43.823232716"), "stdout: {stdout}");
    let json: serde_json::Value = serde_json::from_str(&read(&out, "invariants.json")).unwrap();
    assert!((json["result"]["value"].as_f64().unwrap() - 43.823232716250644).abs() < 1e-12);
    let manifest: serde_json::Value = serde_json::from_str(&read(&out, "manifest.json")).unwrap();
    assert_eq!(manifest["schema_version"], 1);
    assert_eq!(manifest["files"][0]["path"], "invariants.json");
}

#[test]
fn bend_run_is_deterministic_and_certified() {
    let out1 = temp_dir("bend1");
    let out2 = temp_dir("bend2");
    for out in [&out1, &out2] {
        let status = yamabe()
            .args(["bend", "--q", "3", "--theta0", "0.1", "--r0", "50", "--out"])
            .arg(out)
            .status()
            .expect("binary runs");
        assert!(status.success(), "bend exit status {status:?}");
    }
    let a = read(&out1, "curve.csv");
    let b = read(&out2, "curve.csv");
    assert_eq!(a, b, "identical configs must produce byte-identical CSV");
    assert!(a.starts_with("L,t,r,theta,k,defect\n"));
    let cert: serde_json::Value = serde_json::from_str(&read(&out1, "certificate.json")).unwrap();
    assert_eq!(cert["pass"], true);
    // Manifest lists both files with hashes.
    let manifest: serde_json::Value = serde_json::from_str(&read(&out1, "manifest.json")).unwrap();
    let files: Vec<&str> =
        manifest["files"].as_array().unwrap().iter().map(|f| f["path"].as_str().unwrap()).collect();
    assert!(files.contains(&"curve.csv") && files.contains(&"certificate.json"));
}

#[test]
fn invalid_parameters_exit_with_usage_error() {
    let out = temp_dir("bad");
    let output = yamabe()
        .args(["bend", "--q", "2", "--out"])
        .arg(&out)
        .output()
        .expect("binary runs");
    assert_eq!(output.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("codimension"), "stderr: {stderr}");
}

#[test]
fn failed_check_exits_with_certification_status() {
    // A curvature check against a wrong expected constant reports
    // violations and exits 2.
    let out = temp_dir("curv");
    let output = yamabe()
        .args([
            "curvature",
            "--model",
            "s2",
            "--resolution",
            "48",
            "--expected",
            "1.5",
            "--tolerance",
            "0.01",
            "--out",
        ])
        .arg(&out)
        .output()
        .expect("binary runs");
    assert_eq!(output.status.code(), Some(2));
    let report: serde_json::Value = serde_json::from_str(&read(&out, "curvature.json")).unwrap();
    assert!(!report["violations"].as_array().unwrap().is_empty());
}

#[test]
fn config_file_supplies_defaults_and_flags_override() {
    let out = temp_dir("config");
    std::fs::create_dir_all(&out).unwrap();
    let config_path = out.join("run.toml");
    std::fs::write(
        &config_path,
        "[quotient]\nmodel = \"torus3\"\nresolution = 10\nphi = \"const\"\n",
    )
    .unwrap();
    // File value: flat torus, Q = 0.
    let output = yamabe()
        .args(["--config"])
        .arg(&config_path)
        .args(["--out"])
        .arg(&out)
        .args(["quotient"])
        .output()
        .expect("binary runs");
    assert!(output.status.success());
    let q: serde_json::Value = serde_json::from_str(&read(&out, "quotient.json")).unwrap();
    assert_eq!(q["model"], "torus3");
    assert!(q["quotient"].as_f64().unwrap().abs() < 1e-9);

    // Flag overrides the file: round sphere instead.
    let output = yamabe()
        .args(["--config"])
        .arg(&config_path)
        .args(["--out"])
        .arg(&out)
        .args(["quotient", "--model", "s3", "--resolution", "48"])
        .output()
        .expect("binary runs");
    assert!(
        output.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    let q: serde_json::Value = serde_json::from_str(&read(&out, "quotient.json")).unwrap();
    assert_eq!(q["model"], "s3");
    assert!(q["quotient"].as_f64().unwrap() > 10.0);
}

#[test]
fn surgery_demo_prints_chain() {
    let out = temp_dir("chain");
    let output = yamabe()
        .args(["surgery-demo", "--n", "5", "--q", "3", "--l", "2", "--m", "1", "--out"])
        .arg(&out)
        .output()
        .expect("binary runs");
    assert!(output.status.success());
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("disjoint_union_yamabe"));
    assert!(stdout.contains("78.996862507"), "stdout: {stdout}");
    let chain: serde_json::Value = serde_json::from_str(&read(&out, "chain.json")).unwrap();
    assert_eq!(chain["all_valid"], true);
    assert_eq!(chain["steps"].as_array().unwrap().len(), 7);
}

#[test]
fn surgery_demo_assembles_desk_model() {
    let out = temp_dir("assemble");
    let output = yamabe()
        .args(["surgery-demo", "--n", "5", "--q", "3", "--assemble", "--out"])
        .arg(&out)
        .output()
        .expect("binary runs");
    assert!(
        output.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    let asm: serde_json::Value = serde_json::from_str(&read(&out, "assembly.json")).unwrap();
    assert_eq!(asm["q"], 3);
    assert!(asm["s_volume"].as_f64().unwrap() > 0.0);
    assert!(asm["s_volume"].as_f64().unwrap() < asm["t_volume"].as_f64().unwrap());
    let regions = asm["regions"].as_array().unwrap();
    assert_eq!(regions.len(), 3);
}

#[test]
fn reduce_writes_profile_and_estimate() {
    let out = temp_dir("reduce");
    let status = yamabe()
        .args([
            "reduce",
            "--model",
            "s3",
            "--resolution",
            "200",
            "--tol",
            "1e-7",
            "--subcritical",
            "0.01",
            "--out",
        ])
        .arg(&out)
        .status()
        .expect("binary runs");
    assert!(status.success());
    let est: serde_json::Value = serde_json::from_str(&read(&out, "estimate.json")).unwrap();
    let value = est["value"].as_f64().unwrap();
    assert!((value - 43.823232716).abs() / 43.8 < 5e-3, "value {value}");
    assert!(read(&out, "profile.csv").starts_with("t,w,s\n"));
    assert!(read(&out, "minimizer.csv").starts_with("t,phi\n"));
}

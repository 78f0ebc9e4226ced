use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn sbm(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sbm"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("SBM_TOL")
        .output()
        .expect("binary runs")
}

fn summary(out: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap()
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p
}

const FMO: &str = r#"{"units": "cm^-1", "real": [[310.0, -97.9, 5.5, -5.8], [-97.9, 230.0, 30.1, 7.3], [5.5, 30.1, 0.0, -58.8], [-5.8, 7.3, -58.8, 180.0]]}"#;

#[test]
fn map_reports_residuals() {
    let tmp = tempfile::tempdir().unwrap();
    let fmo = write(tmp.path(), "fmo.json", FMO);
    let out = tmp.path().join("fmo");
    let run = sbm(&["map", fmo.to_str().unwrap()], &out);
    assert_eq!(run.status.code(), Some(0));
    let s = summary(&out);
    assert!(s["top_block_residual"].as_f64().unwrap() <= 1e-12);
    assert!(s["off_block_residual"].as_f64().unwrap() <= 1e-12);
    assert!(out.join("operator.json").exists());

    let eye = write(tmp.path(), "eye.json", r#"{"real": [[1, 0, 0], [0, 1, 0], [0, 0, 1]]}"#);
    let out = tmp.path().join("eye");
    assert!(sbm(&["map", eye.to_str().unwrap()], &out).status.success());
    let s = summary(&out);
    assert!(s["top_block_residual"].as_f64().unwrap() <= 1e-15);
    assert_eq!(s["off_block_residual"].as_f64(), Some(0.0));
}

#[test]
fn invalid_input_exits_two_with_summary() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = write(tmp.path(), "bad.json", r#"{"real": [[1, 2], [3, 4]]}"#);
    let out = tmp.path().join("bad");
    let run = sbm(&["map", bad.to_str().unwrap()], &out);
    assert_eq!(run.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&run.stderr).contains("1.000e0"));
    assert_eq!(summary(&out)["status"], "invalid");

    let out = tmp.path().join("ensemble");
    let run = sbm(&["bench", "spinboson", "--cutoff", "2"], &out);
    assert_eq!(run.status.code(), Some(2));
    assert!(summary(&out)["error"].as_str().unwrap().contains("ensemble"));
}

#[test]
fn report_tolerance_leaves_status_alone() {
    let tmp = tempfile::tempdir().unwrap();
    let fmo = write(tmp.path(), "fmo.json", FMO);
    let out = tmp.path().join("tol");
    let run = Command::new(env!("CARGO_BIN_EXE_sbm"))
        .args(["map", fmo.to_str().unwrap(), "--out"])
        .arg(&out)
        .env("SBM_TOL", "100")
        .output()
        .unwrap();
    assert!(run.status.success());
    let s = summary(&out);
    assert_eq!(s["report_tol"].as_f64(), Some(100.0));
    assert_eq!(s["threshold"].as_f64(), Some(1e-12));
    assert!(s["entries"].as_u64().unwrap() < 31);
}

#[test]
fn transpile_sources() {
    let tmp = tempfile::tempdir().unwrap();
    let cz = write(
        tmp.path(),
        "cz.json",
        r#"{"units": "dimensionless", "real": [[1,0,0,0],[0,1,0,0],[0,0,1,0],[0,0,0,-1]]}"#,
    );
    let out = tmp.path().join("cz");
    assert!(sbm(&["transpile", "--unitary", cz.to_str().unwrap()], &out).status.success());
    let s = summary(&out);
    assert_eq!(s["cz_count"], 1);
    assert!((s["fidelity"].as_f64().unwrap() - 1.0).abs() < 1e-15);

    let fmo = write(tmp.path(), "fmo.json", FMO);
    let out = tmp.path().join("fmo");
    assert!(sbm(&["transpile", "--hamiltonian", fmo.to_str().unwrap(), "--tau", "5"], &out).status.success());
    assert!(summary(&out)["fidelity"].as_f64().unwrap() >= 1.0 - 1e-9);
    assert!(summary(&out)["snail_fidelity"].as_f64().unwrap() >= 1.0 - 1e-9);

    let out = tmp.path().join("random");
    assert!(sbm(&["transpile", "--random", "--seed", "17"], &out).status.success());
    let s = summary(&out);
    assert!(s["fidelity"].as_f64().unwrap() >= 1.0 - 1e-9);
    assert!(s["cz_count"].as_u64().unwrap() <= 3);
    let compiled = fs::read_to_string(out.join("compiled.json")).unwrap();
    assert!(compiled.contains("\"crosskerr\"") && compiled.contains("\"snail\""));
}

#[test]
fn dynamics_benchmarks_pass() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("tls");
    assert!(sbm(&["bench", "tls", "--epsilon", "50", "--delta", "20"], &out).status.success());
    let s = summary(&out);
    assert!(s["max_deviation"].as_f64().unwrap() < 1e-8);
    assert!(s["rabi_deviation"].as_f64().unwrap() < 1e-8);
    let csv = fs::read_to_string(out.join("snail.csv")).unwrap();
    assert_eq!(csv.lines().count(), 202);

    let out = tmp.path().join("fmo");
    assert!(sbm(&["bench", "fmo", "--tau", "5", "--steps", "200"], &out).status.success());
    assert!(summary(&out)["max_deviation"].as_f64().unwrap() < 1e-8);
    assert!(out.join("direct.csv").exists() && out.join("circuit.json").exists());
}

#[test]
fn spin_boson_bench_and_reruns_are_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let args = ["bench", "spinboson", "--modes", "4", "--cutoff", "6"];
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    assert!(sbm(&args, &a).status.success());
    let s = summary(&a);
    assert!(s["circuit_deviation"].as_f64().unwrap() < 1e-8);
    assert_eq!(s["spec"]["n_modes"], 4);
    let header = fs::read_to_string(a.join("superoperator.csv")).unwrap();
    assert!(header.starts_with("t,p00,p01,p10,p11,rescale\n"));

    let args = ["bench", "spinboson", "--n_modes", "3", "--cutoff", "4", "--beta", "4"];
    assert!(sbm(&args, &a).status.success());
    assert!(sbm(&args, &b).status.success());
    for name in ["summary.json", "superoperator.csv", "direct.csv", "snail.csv", "spec.json"] {
        assert_eq!(fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).unwrap(), "{name}");
    }
}

#[test]
fn selftest_is_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    assert!(sbm(&["selftest", "--seed", "3"], &a).status.success());
    assert!(sbm(&["selftest", "--seed", "3"], &b).status.success());
    assert_eq!(fs::read(a.join("summary.json")).unwrap(), fs::read(b.join("summary.json")).unwrap());
    assert_eq!(summary(&a)["checks"].as_array().unwrap().len(), 9);
}

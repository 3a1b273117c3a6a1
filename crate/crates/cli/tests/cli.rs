use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn fable(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fable"))
        .args(args)
        .current_dir(dir)
        .env_remove("FABLE_WORKERS")
        .output()
        .expect("spawn fable")
}

fn ok_json(args: &[&str], dir: &Path) -> Value {
    let out = fable(args, dir);
    assert!(
        out.status.success(),
        "fable {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

fn generate(dir: &Path, n: &str, seed: &str) {
    ok_json(
        &["generate", "--family", "uniform-sparse", "--n", n, "--s", "2", "--seed", seed, "-o", "a.mtx"],
        dir,
    );
}

#[test]
fn generate_reports_matrix_summary() {
    let dir = tempfile::tempdir().unwrap();
    let v = ok_json(
        &["generate", "--family", "binary-sparse", "--n", "4", "--s", "3", "--seed", "7", "-o", "b.mtx"],
        dir.path(),
    );
    assert_eq!(v["nnz"], 48);
    assert_eq!(v["s"], 3.0);
    assert_eq!(v["max_abs_entry"], 1.0);
    let text = std::fs::read_to_string(dir.path().join("b.mtx")).unwrap();
    assert!(text.starts_with("%%MatrixMarket matrix coordinate real general"));
}

#[test]
fn generate_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    generate(dir.path(), "5", "3");
    let first = std::fs::read(dir.path().join("a.mtx")).unwrap();
    generate(dir.path(), "5", "3");
    assert_eq!(first, std::fs::read(dir.path().join("a.mtx")).unwrap());
}

#[test]
fn encode_then_verify_every_method() {
    let dir = tempfile::tempdir().unwrap();
    generate(dir.path(), "3", "11");
    for (method, extra) in [("fable", vec!["--delta", "0.01"]), ("sfable", vec!["--delta", "0.01"]), ("lsfable", vec![])] {
        let mut args = vec!["encode", "-i", "a.mtx", "-m", method, "-c", "c.qasm"];
        args.extend(extra);
        let report = ok_json(&args, dir.path());
        assert_eq!(report["schema"], 1);
        assert_eq!(report["ancillas"], 4);
        assert_eq!(report["alpha"], 0.125);
        let v = ok_json(&["verify", "--matrix", "a.mtx", "--circuit", "c.qasm"], dir.path());
        assert_eq!(v["pass"], true, "{method}: {v}");
        let err = (v["epsilon"].as_f64().unwrap() - report["epsilon"].as_f64().unwrap()).abs();
        assert!(err < 1e-7, "{method}: simulated and closed-form errors differ by {err}");
        let counts = ok_json(&["counts", "--circuit", "c.qasm"], dir.path());
        assert_eq!(counts["gates"], report["gates"]);
    }
}

#[test]
fn epsilon_target_and_unreachable_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    generate(dir.path(), "4", "5");
    let out = fable(
        &["encode", "-i", "a.mtx", "-m", "sfable", "--epsilon", "0.05", "-c", "c.qasm", "--report", "r.json"],
        dir.path(),
    );
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let report: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
    assert_eq!(report["reached"], true);
    assert!(report["epsilon"].as_f64().unwrap() < 0.05);

    let out = fable(&["encode", "-i", "a.mtx", "-m", "fable", "--epsilon", "1e-30", "-c", "c.qasm"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["reached"], false);
}

#[test]
fn verify_detects_tampered_circuit() {
    let dir = tempfile::tempdir().unwrap();
    generate(dir.path(), "3", "2");
    ok_json(&["encode", "-i", "a.mtx", "-m", "fable", "-c", "c.qasm"], dir.path());
    let text = std::fs::read_to_string(dir.path().join("c.qasm")).unwrap();
    let line = text.lines().find(|l| l.starts_with("ry(")).unwrap().to_string();
    let tampered = text.replacen(&line, "ry(0.3) q[0];", 1);
    std::fs::write(dir.path().join("c.qasm"), tampered).unwrap();
    let out = fable(&["verify", "--matrix", "a.mtx", "--circuit", "c.qasm"], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn fable_rejects_out_of_range_entries_without_rescale() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("m.csv"), "2,0\n0,1\n").unwrap();
    let out = fable(&["encode", "-i", "m.csv", "-m", "fable", "-c", "c.qasm"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--rescale"));
    let v = ok_json(&["encode", "-i", "m.csv", "-m", "fable", "--rescale", "-c", "c.qasm"], dir.path());
    assert_eq!(v["alpha"], 0.25);
    let v = ok_json(&["verify", "--matrix", "m.csv", "--circuit", "c.qasm"], dir.path());
    assert_eq!(v["pass"], true);
}

#[test]
fn counts_from_matrix_match_circuit() {
    let dir = tempfile::tempdir().unwrap();
    generate(dir.path(), "4", "9");
    ok_json(&["encode", "-i", "a.mtx", "-m", "sfable", "--delta", "0.02", "-c", "c.qasm"], dir.path());
    let from_file = ok_json(&["counts", "--circuit", "c.qasm"], dir.path());
    let predicted = ok_json(&["counts", "-i", "a.mtx", "-m", "sfable", "--delta", "0.02"], dir.path());
    assert_eq!(from_file["gates"], predicted["gates"]);
}

#[test]
fn sweep_from_config_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = r#"
name = "tiny"
methods = ["fable", "sfable"]
n = [3, 4]
s = [2.0]
samples = 2
seed = 5

[generator]
family = "uniform_sparse"

[mode]
kind = "threshold"
deltas = [0.0, 0.01]
"#;
    std::fs::write(dir.path().join("tiny.toml"), cfg).unwrap();
    let v = ok_json(&["sweep", "--config", "tiny.toml", "-o", "a.csv"], dir.path());
    assert_eq!(v["rows"], 16);
    assert_eq!(v["bound_violations"], 0);
    ok_json(&["--workers", "1", "sweep", "--config", "tiny.toml", "-o", "b.csv"], dir.path());
    let a = std::fs::read(dir.path().join("a.csv")).unwrap();
    assert_eq!(a, std::fs::read(dir.path().join("b.csv")).unwrap());
}

#[test]
fn sweep_lists_and_prints_presets() {
    let dir = tempfile::tempdir().unwrap();
    let out = fable(&["sweep", "--list-presets"], dir.path());
    let names = String::from_utf8(out.stdout).unwrap();
    assert!(names.lines().any(|l| l == "fig6_left"));
    let out = fable(&["sweep", "--preset", "table1", "--print-config"], dir.path());
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout).unwrap().contains("name = \"table1\""));
    let out = fable(&["sweep", "--preset", "nope", "-o", "x.csv"], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn verify_guards_large_circuits() {
    let dir = tempfile::tempdir().unwrap();
    generate(dir.path(), "7", "1");
    ok_json(&["encode", "-i", "a.mtx", "-m", "lsfable", "-c", "c.qasm"], dir.path());
    let out = fable(&["verify", "--matrix", "a.mtx", "--circuit", "c.qasm"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("guard"));
}

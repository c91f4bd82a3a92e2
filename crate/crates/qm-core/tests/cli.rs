//! End-to-end tests of the `qm` binary: JSON formats and exit codes.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};

fn qm() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qm"))
}

fn write(dir: &Path, name: &str, v: &Value) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, v.to_string()).unwrap();
    path
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn gram_json(entries: &[&[i64]]) -> Value {
    json!({"rank": entries.len(), "entries": entries})
}

#[test]
fn disc_reports_module_and_lifts() {
    let dir = tempfile::tempdir().unwrap();
    let k = write(dir.path(), "k.json", &gram_json(&[&[2]]));
    let out = qm().args(["disc", "--gram"]).arg(&k).output().unwrap();
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["fqm"]["orders"], json!([2]));
    assert_eq!(v["fqm"]["q"], json!(["1/4"]));
    assert_eq!(v["generator_lifts"].as_array().unwrap().len(), 1);
}

#[test]
fn disc_writes_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let k = write(dir.path(), "k.json", &gram_json(&[&[2, 1], &[1, 2]]));
    let out_path = dir.path().join("disc.json");
    let out = qm()
        .args(["disc", "--gram"])
        .arg(&k)
        .arg("--out")
        .arg(&out_path)
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(v["fqm"]["orders"], json!([3]));
    assert_eq!(v["fqm"]["q"], json!(["1/3"]));
}

#[test]
fn invalid_gram_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    // odd diagonal entry
    let k = write(dir.path(), "k.json", &gram_json(&[&[1]]));
    let out = qm().args(["disc", "--gram"]).arg(&k).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
    // singular matrix
    let k = write(dir.path(), "s.json", &gram_json(&[&[2, 2], &[2, 2]]));
    let out = qm().args(["disc", "--gram"]).arg(&k).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn decompose_and_realize_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let fqm = write(
        dir.path(),
        "m.json",
        &json!({"orders": [6], "q": ["7/12"], "b": []}),
    );
    let out = qm().args(["decompose", "--fqm"]).arg(&fqm).output().unwrap();
    assert!(out.status.success());
    let blocks = stdout_json(&out);
    let kinds: Vec<&str> = blocks
        .as_array()
        .unwrap()
        .iter()
        .map(|b| b["kind"].as_str().unwrap())
        .collect();
    assert_eq!(kinds.len(), 2);
    assert!(kinds.contains(&"ATwo") && kinds.contains(&"AOdd"));

    let cache = dir.path().join("cache.json");
    let out = qm()
        .args(["realize", "--fqm"])
        .arg(&fqm)
        .arg("--realization-cache")
        .arg(&cache)
        .output()
        .unwrap();
    assert!(out.status.success());
    let k = stdout_json(&out);
    assert!(k["rank"].as_u64().unwrap() >= 1);
    assert!(cache.exists());

    // the realized lattice has the module as its discriminant
    let k_path = write(dir.path(), "k.json", &k);
    let out = qm().args(["disc", "--gram"]).arg(&k_path).output().unwrap();
    let disc = stdout_json(&out);
    let disc_fqm = write(dir.path(), "disc_fqm.json", &disc["fqm"]);
    let out = qm().arg("isom").arg(&disc_fqm).arg(&fqm).output().unwrap();
    assert!(out.status.success());
}

#[test]
fn isom_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(
        dir.path(),
        "a.json",
        &json!({"orders": [3], "q": ["1/3"], "b": []}),
    );
    let b = write(
        dir.path(),
        "b.json",
        &json!({"orders": [3], "q": ["2/3"], "b": []}),
    );
    let out = qm().arg("isom").arg(&a).arg(&a).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert!(v["generator_images"].is_array());

    let out = qm().arg("isom").arg(&a).arg(&b).output().unwrap();
    assert_eq!(out.status.code(), Some(1));

    let bad = write(dir.path(), "bad.json", &json!({"orders": [3]}));
    let out = qm().arg("isom").arg(&a).arg(&bad).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn equivalent_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let k2 = write(dir.path(), "k2.json", &gram_json(&[&[2]]));
    let stab = write(
        dir.path(),
        "stab.json",
        &gram_json(&[&[2, 0, 0], &[0, 0, 1], &[0, 1, 0]]),
    );
    let neg = write(dir.path(), "neg.json", &gram_json(&[&[-2]]));

    let out = qm().arg("equivalent").arg(&k2).arg(&stab).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["verdict"], json!("equivalent"));

    let out = qm().arg("equivalent").arg(&k2).arg(&neg).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout_json(&out)["verdict"], json!("inequivalent"));
}

#[test]
fn modular_formats_and_genus() {
    let dir = tempfile::tempdir().unwrap();
    let k = write(dir.path(), "k.json", &gram_json(&[&[2]]));
    let out = qm()
        .args(["modular", "--gram"])
        .arg(&k)
        .args(["--genus", "0,1,2"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["scale_sq"], json!(2));
    assert_eq!(v["c"], json!(1));
    assert_eq!(v["t_exponents"], json!(["0/1", "1/4"]));
    assert_eq!(v["dims"]["2"], json!("4"));

    let out = qm()
        .args(["modular", "--gram"])
        .arg(&k)
        .args(["--format", "float"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v = stdout_json(&out);
    let s00 = v["s"][0][0].as_array().unwrap();
    assert!((s00[0].as_f64().unwrap() - 1.0 / 2f64.sqrt()).abs() < 1e-12);
}

#[test]
fn modular_rejects_degenerate_with_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(
        dir.path(),
        "m.json",
        &json!({"orders": [2], "q": ["1/2"], "b": []}),
    );
    let out = qm().args(["modular", "--fqm"]).arg(&m).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn enumerate_writes_class_files() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("classes");
    let out = qm()
        .args(["enumerate", "--order", "4", "--out"])
        .arg(&out_dir)
        .output()
        .unwrap();
    assert!(out.status.success());
    let v = stdout_json(&out);
    let count = v["classes"].as_u64().unwrap();
    assert!(count > 0);
    assert_eq!(v["files"].as_array().unwrap().len() as u64, count);
    for f in v["files"].as_array().unwrap() {
        assert!(out_dir.join(f.as_str().unwrap()).exists());
    }
}

#[test]
fn size_guard_flag_is_enforced() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(
        dir.path(),
        "m.json",
        &json!({"orders": [3], "q": ["1/3"], "b": []}),
    );
    let out = qm()
        .args(["--size-guard", "2", "decompose", "--fqm"])
        .arg(&m)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("guard"), "stderr was: {err}");
}

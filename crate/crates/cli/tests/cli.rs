use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn coninv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_coninv")).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const GOLDEN: &str = r#"{"version":"1","n":2,"A":[[[1,0],[1,0]],[[0,0],[1,0]]],"v":[[0,0],[1,0]]}"#;
const DIAG23: &str = r#"{"n":2,"A":[[[2,0],[0,0]],[[0,0],[3,0]]]}"#;

#[test]
fn check_coninvolution_with_imaginary_translation() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "g.json", r#"{"n":1,"A":[[[1,0]]],"v":[[0,3]]}"#);
    let out = coninv(&["check", "--coninv", s(&p)]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("coninvolution: true"));
}

#[test]
fn check_crev_false_on_diag23() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "g.json", DIAG23);
    let out = coninv(&["check", "--crev", s(&p)]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stdout).contains("c-reversible: false"));
}

#[test]
fn malformed_inputs_exit_2() {
    let dir = TempDir::new().unwrap();
    for (i, text) in [
        r#"{"n":1,"A":"#,
        r#"{"n":2,"A":[[[1,0]]]}"#,
        r#"{"n":1,"A":[[[1,0]]],"v":[[0,0],[0,0]]}"#,
        r#"[1,2,3]"#,
    ]
    .iter()
    .enumerate()
    {
        let p = write(&dir, &format!("bad{i}.json"), text);
        assert_eq!(code(&coninv(&["check", s(&p)])), 2, "{text}");
        assert_eq!(code(&coninv(&["factor", "--four", s(&p)])), 2, "{text}");
    }
    assert_eq!(code(&coninv(&["check", "/nonexistent/instance.json"])), 2);
    assert_eq!(code(&coninv(&["factor", "/nonexistent/instance.json"])), 2);
}

#[test]
fn factor_two_golden() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "g.json", GOLDEN);
    let out_path = dir.path().join("cert.json");
    let out = coninv(&["factor", "--two", s(&p), "--out", s(&out_path)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let cert: Value = serde_json::from_str(&fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(cert["kind"], "two");
    assert_eq!(cert["residual_product"].as_f64(), Some(0.0));
    let f1: Value = serde_json::from_str(r#"[[[1.0,0.0],[0.0,0.0]],[[0.0,0.0],[-1.0,0.0]]]"#).unwrap();
    let f2: Value = serde_json::from_str(r#"[[[1.0,0.0],[1.0,0.0]],[[0.0,0.0],[-1.0,0.0]]]"#).unwrap();
    assert_eq!(cert["factors"][0]["A"], f1);
    assert_eq!(cert["factors"][1]["A"], f2);
    for key in [
        "input",
        "factors",
        "residual_factors",
        "provenance",
        "seed",
        "tolerance",
    ] {
        assert!(cert.get(key).is_some(), "{key}");
    }
}

#[test]
fn factor_rejections_exit_1() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "g.json", DIAG23);
    let out = coninv(&["factor", "--two", s(&p)]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("CReversibilityRequired"));
    let out = coninv(&["factor", "--four", s(&p)]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("DeterminantModulusNotOne"));
    let w = write(&dir, "k.json", r#"{"n":2,"A":[[[1,0],[0,0]],[[0,0],[1,0]]]}"#);
    assert_eq!(code(&coninv(&["factor", "--three", "--witness", s(&w), s(&p)])), 1);
}

#[test]
fn factor_three_needs_witness() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "g.json", GOLDEN);
    assert_eq!(code(&coninv(&["factor", "--three", s(&p)])), 2);
    let w = write(
        &dir,
        "k.json",
        r#"{"n":2,"A":[[[2,0],[0,1]],[[0,0],[1,0]]],"v":[[0,1],[0,0]]}"#,
    );
    let out = coninv(&["factor", "--three", "--witness", s(&w), s(&p)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let cert: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(cert["kind"], "three");
    assert_eq!(cert["factors"].as_array().unwrap().len(), 3);
}

#[test]
fn factor_four_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let p = write(
        &dir,
        "g.json",
        r#"{"n":3,"A":[[[0,0],[4,0],[0,0]],[[0,-0.25],[0,0],[0,0]],[[0,0],[0,0],[1,0]]],"v":[[1,0],[0,2],[-1,1]]}"#,
    );
    let a = coninv(&["factor", "--four", "--seed", "7", s(&p)]);
    let b = coninv(&["factor", "--four", "--seed", "7", s(&p)]);
    assert_eq!(code(&a), 0, "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let cert: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(cert["seed"], 7);
    assert!(cert["residual_product"].as_f64().unwrap() <= 1e-9);
}

#[test]
fn consqrt_examples() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "m.json", r#"{"n":1,"A":[[[-1,0]]],"v":[[0,0]]}"#);
    let out = coninv(&["consqrt", s(&p)]);
    assert_eq!(code(&out), 0);
    let h: Value = serde_json::from_slice(&out.stdout).unwrap();
    let re = h["A"][0][0][0].as_f64().unwrap();
    let im = h["A"][0][0][1].as_f64().unwrap();
    // h / h̄ = -1 means h is purely imaginary
    assert!(re.abs() < 1e-12 && im.abs() > 1e-3);

    let p = write(&dir, "e.json", r#"{"n":2,"A":[[[1,0],[0,0]],[[0,0],[1,0]]]}"#);
    let out = coninv(&["consqrt", s(&p)]);
    assert_eq!(code(&out), 0);
    let h: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(h["A"][0][1], serde_json::json!([0.0, 0.0]));
    assert_eq!(h["A"][0][0], h["A"][1][1]);

    let p = write(&dir, "o.json", r#"{"n":1,"A":[[[1,0]]],"v":[[1,0]]}"#);
    assert_eq!(code(&coninv(&["consqrt", s(&p)])), 1);
}

#[test]
fn selftest_passes_and_is_deterministic() {
    let a = coninv(&["selftest", "--count", "100", "--dims", "1..4"]);
    assert_eq!(code(&a), 0, "{}", String::from_utf8_lossy(&a.stdout));
    assert!(String::from_utf8_lossy(&a.stdout).contains("worst residual"));
    let x = coninv(&["selftest", "--seed", "42"]);
    let y = coninv(&["selftest", "--seed", "42"]);
    assert_eq!(code(&x), 0);
    assert_eq!(x.stdout, y.stdout);
}

#[test]
fn selftest_unattainable_tolerance_exits_3() {
    let out = coninv(&["selftest", "--tol", "1e-30", "--count", "5"]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stdout).contains("seed="));
}

#[test]
fn invalid_tolerance_is_malformed() {
    assert_eq!(code(&coninv(&["selftest", "--tol", "-1"])), 2);
    assert_eq!(code(&coninv(&["selftest", "--dims", "3..1"])), 2);
}

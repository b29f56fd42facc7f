use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_spectral-delta"))
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn entry(m: &Value, i: usize, j: usize) -> (f64, f64) {
    let e = &m["entries"][i][j];
    (e[0].as_f64().unwrap(), e[1].as_f64().unwrap())
}

#[test]
fn eig_viola_spectrum() {
    let viola = data("viola.json");
    let out = run(&["eig", viola.to_str().unwrap()]);
    assert!(out.status.success());
    let v = json(&out);
    let ev: Vec<f64> = v["eigenvalues"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    for (a, b) in ev.iter().zip([-1.0, -1.0, 2.0]) {
        assert!((a - b).abs() < 1e-12);
    }
    assert_eq!(v["meta"]["command"], "eig");
}

#[test]
fn eig_identity_all_ones() {
    let out = run(&["eig", data("identity.json").to_str().unwrap()]);
    let v = json(&out);
    assert!(v["eigenvalues"].as_array().unwrap().iter().all(|x| (x.as_f64().unwrap() - 1.0).abs() < 1e-14));
}

#[test]
fn non_hermitian_exits_2() {
    let out = run(&["eig", data("nonhermitian.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("NotHermitian"));
}

#[test]
fn usage_error_exits_2() {
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(run(&["eig", "/nonexistent.json"]).status.code(), Some(2));
}

#[test]
fn apply_square_on_viola() {
    let out = run(&["apply", data("viola.json").to_str().unwrap(), "--f", "square"]);
    assert!(out.status.success());
    let r = &json(&out)["result"];
    for i in 0..3 {
        for j in 0..3 {
            let want = if i == j { 2.0 } else { 1.0 };
            let (re, im) = entry(r, i, j);
            assert!((re - want).abs() < 1e-12 && im.abs() < 1e-12);
        }
    }
}

#[test]
fn apply_on_scalar_operator() {
    let out = run(&["apply", data("scalar.json").to_str().unwrap(), "--f", "gaussian:0,1", "--method", "dunford"]);
    let r = &json(&out)["result"];
    let want = (-0.5_f64 * 0.7 * 0.7).exp();
    assert!((entry(r, 0, 0).0 - want).abs() < 1e-10);
    assert!(entry(r, 0, 1).0.abs() < 1e-10);
}

#[test]
fn density_peaks_carry_projector_weights() {
    let out = run(&[
        "density",
        data("viola.json").to_str().unwrap(),
        "--kernel",
        "gaussian",
        "--width",
        "0.05",
        "--grid",
        "-3:4:7001",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# spectral-delta"));
    assert_eq!(lines.next().unwrap(), "lambda,re,im");
    let rows: Vec<(f64, f64)> = lines
        .map(|l| {
            let f: Vec<f64> = l.split(',').map(|x| x.parse().unwrap()).collect();
            (f[0], f[1])
        })
        .collect();
    let h = rows[1].0 - rows[0].0;
    let mass = |lo: f64, hi: f64| -> f64 { rows.iter().filter(|r| r.0 > lo && r.0 < hi).map(|r| r.1 * h).sum() };
    assert!((mass(-2.0, 0.5) - 2.0 / 3.0).abs() < 1e-6);
    assert!((mass(0.5, 3.0) - 1.0 / 3.0).abs() < 1e-6);
}

#[test]
fn stone_viola_projector() {
    let out = run(&["stone", data("viola.json").to_str().unwrap(), "--a", "-2", "--b", "0"]);
    assert!(out.status.success());
    let r = &json(&out)["result"];
    for i in 0..3 {
        for j in 0..3 {
            let want = if i == j { 2.0 / 3.0 } else { -1.0 / 3.0 };
            assert!((entry(r, i, j).0 - want).abs() < 1e-3);
        }
    }
}

#[test]
fn laplacian_negative_lambda_is_zero() {
    let out = run(&["model", "laplacian", "--n", "128", "--lambda", "-1", "--profile"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut body = text.lines().filter(|l| !l.starts_with('#'));
    let cols: Vec<&str> = body.next().unwrap().split(',').collect();
    let idx = cols.iter().position(|c| c.starts_with("closed")).expect("closed-form column");
    for line in body {
        let v: f64 = line.split(',').nth(idx).unwrap().parse().unwrap();
        assert_eq!(v, 0.0);
    }
}

#[test]
fn paper_suite_exit_codes() {
    assert_eq!(run(&["paper-suite"]).status.code(), Some(0));
    assert_eq!(run(&["paper-suite", "--tolerance-scale", "1e-9"]).status.code(), Some(1));
    assert_eq!(run(&["paper-suite", "--data", "/nonexistent/dir"]).status.code(), Some(2));
}

#[test]
fn outputs_are_deterministic() {
    let viola = data("viola.json");
    let m = viola.to_str().unwrap();
    for args in [
        vec!["stone", m, "--a", "-2", "--b", "0"],
        vec!["density", m, "--width", "0.1"],
        vec!["apply", m, "--f", "gaussian", "--method", "time"],
        vec!["paper-suite", "--seed", "5"],
    ] {
        let a = run(&args);
        let b = run(&args);
        assert!(a.status.success(), "{args:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn out_dir_receives_files() {
    let dir = std::env::temp_dir().join(format!("spectral-delta-cli-{}", std::process::id()));
    let out = run(&["--out", dir.to_str().unwrap(), "eig", data("viola.json").to_str().unwrap()]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(dir.join("eig.json")).unwrap();
    assert!(text.contains("\"eigenvalues\""));
    std::fs::remove_dir_all(&dir).unwrap();
}

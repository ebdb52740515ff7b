use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const GRID: &str = "-10:10:256";

fn symtomo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_symtomo"))
        .args(args)
        .env_remove("TOMO_THREADS")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn read_csv(path: &Path) -> Vec<Vec<f64>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect()
}

fn normal(x: f64, var: f64) -> f64 {
    (-x * x / (2.0 * var)).exp() / (2.0 * std::f64::consts::PI * var).sqrt()
}

#[test]
fn wigner_peak_of_the_ground_state() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().to_str().unwrap();
    let out = symtomo(&["wigner", "--state", "gaussian:0.5,0", "--grid", GRID, "--out", out_dir]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let rows = read_csv(&dir.path().join("wigner.csv"));
    assert_eq!(rows.len(), 256 * 256);
    let origin = rows.iter().find(|r| r[0] == 0.0 && r[1] == 0.0).expect("origin is a grid point");
    assert!((origin[2] - 1.0 / std::f64::consts::PI).abs() < 1e-6);
    assert!(dir.path().join("wigner.json").exists());
    let summary = stdout_json(&out);
    assert!((summary["peak"].as_f64().unwrap() - 1.0 / std::f64::consts::PI).abs() < 1e-6);
}

#[test]
fn configuration_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().to_str().unwrap();
    let missing = dir.path().join("missing.json");
    let file_state = format!("file:{}", missing.display());
    for args in [
        vec!["wigner", "--state", &file_state, "--out", out_dir],
        vec!["wigner", "--state", "gaussian:1,0", "--grid", "-8:8:1000", "--out", out_dir],
        vec!["wigner", "--state", "gaussian:1", "--out", out_dir],
        vec!["tomogram", "--state", "gaussian:1,0", "--grid", GRID, "--mu", "0", "--nu", "0", "--out", out_dir],
        vec!["tomogram", "--state", "gaussian:1,0", "--grid", GRID, "--mu", "1", "--nu", "0", "--route", "chirp-fft", "--out", out_dir],
        vec!["pauli-demo", "--state", &file_state],
        vec!["pauli-demo", "--state", "gaussian:1,0,0.2"],
        vec!["no-such-command"],
    ] {
        let out = symtomo(&args);
        assert_eq!(code(&out), 2, "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn chirp_route_with_zero_nu_explains_itself() {
    let dir = tempfile::tempdir().unwrap();
    let out = symtomo(&[
        "tomogram", "--state", "gaussian:1,0", "--grid", GRID, "--mu", "1", "--nu", "0", "--route", "chirp-fft",
        "--out", dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("nu"));
}

#[test]
fn position_tomogram_is_the_normal_density() {
    let dir = tempfile::tempdir().unwrap();
    let out = symtomo(&[
        "tomogram", "--state", "gaussian:1,0", "--grid", GRID, "--mu", "1", "--nu", "0",
        "--out", dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let manifest: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("tomogram.json")).unwrap()).unwrap();
    assert_eq!(manifest["route"], "metaplectic");
    let file = manifest["blocks"][0]["file"].as_str().unwrap();
    for row in read_csv(&dir.path().join(file)) {
        assert!((row[1] - normal(row[0], 1.0)).abs() < 1e-7);
    }
}

#[test]
fn sweep_inversion_and_its_guards() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();
    let ref_dir = root.join("ref");
    let out = symtomo(&["wigner", "--state", "gaussian:0.5,0", "--grid", GRID, "--out", ref_dir.to_str().unwrap()]);
    assert_eq!(code(&out), 0);

    let sweep = root.join("sweep");
    let out = symtomo(&[
        "tomogram", "--state", "gaussian:0.5,0", "--grid", GRID, "--angles", "360", "--format", "f64le",
        "--out", sweep.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let manifest_path = sweep.join("tomogram.json");
    let manifest: Value = serde_json::from_str(&std::fs::read_to_string(&manifest_path).unwrap()).unwrap();
    assert_eq!(manifest["blocks"].as_array().unwrap().len(), 360);

    let inv = root.join("inv");
    let out = symtomo(&[
        "invert", "--input", manifest_path.to_str().unwrap(), "--out", inv.to_str().unwrap(),
        "--reference", ref_dir.join("wigner.json").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report: Value = serde_json::from_str(&std::fs::read_to_string(inv.join("report.json")).unwrap()).unwrap();
    assert!(report["residual_linf"].as_f64().unwrap() <= 1e-3);
    assert_eq!(report["angles"], 360);

    // A reference on another grid.
    let other = root.join("other");
    symtomo(&["wigner", "--state", "gaussian:0.5,0", "--grid", "-8:8:128", "--out", other.to_str().unwrap()]);
    let out = symtomo(&[
        "invert", "--input", manifest_path.to_str().unwrap(), "--out", inv.to_str().unwrap(),
        "--reference", other.join("wigner.json").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2);

    // Too few angles.
    let few = root.join("few");
    let out = symtomo(&[
        "tomogram", "--state", "gaussian:0.5,0", "--grid", GRID, "--angles", "4", "--out", few.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let out = symtomo(&[
        "invert", "--input", few.join("tomogram.json").to_str().unwrap(), "--out", inv.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2);

    // Malformed manifest.
    let bad = root.join("bad.json");
    std::fs::write(&bad, "{\"hbar\": 1.0, \"blocks\": 3}").unwrap();
    let out = symtomo(&["invert", "--input", bad.to_str().unwrap(), "--out", inv.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
}

#[test]
fn pauli_demo_resolves_the_sign() {
    let out = symtomo(&["pauli-demo", "--state", "gaussian:1,0.4", "--grid", "-12:12:512"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let r = stdout_json(&out);
    assert_eq!(r["ambiguity"]["twin"]["sigma_xp"].as_f64().unwrap(), -0.4);
    assert!(r["ambiguity"]["position_tomogram_difference"].as_f64().unwrap() <= 1e-10);
    assert!(r["ambiguity"]["momentum_tomogram_difference"].as_f64().unwrap() <= 1e-10);
    assert_eq!(r["resolution"]["sign"], "plus");
    assert!(r["resolution"]["margin_over_tolerance"].as_f64().unwrap() > 10.0);
    assert!((r["resolution"]["recovered"]["sigma_xp"].as_f64().unwrap() - 0.4).abs() < 1e-4);
    assert_eq!(r["resolution"]["sign_moot"], false);
}

#[test]
fn pauli_demo_flags_a_moot_sign() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pauli.json");
    let out = symtomo(&["pauli-demo", "--state", "gaussian:1,0", "--grid", "-12:12:512", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(r["resolution"]["sign_moot"], true);
    assert!(r["note"].as_str().unwrap().contains("sign moot"));
}

#[test]
fn outputs_are_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let out = symtomo(&[
            "tomogram", "--state", "gaussian:0.8,-0.2", "--grid", GRID, "--angles", "12", "--route", "chirp-fft",
            "--out", dir.path().to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0);
    }
    for k in [0, 5, 11] {
        let name = format!("tomogram_{k:04}.csv");
        assert_eq!(std::fs::read(a.path().join(&name)).unwrap(), std::fs::read(b.path().join(&name)).unwrap());
    }
}

#[test]
fn check_suite_passes_by_default() {
    let out = symtomo(&["check"]);
    let table = String::from_utf8_lossy(&out.stdout);
    assert_eq!(code(&out), 0, "{table}");
    let named = table.lines().filter(|l| l.contains(" PASS ")).count();
    assert!(named >= 12, "{table}");
}

#[test]
fn check_suite_negative_control_and_seed() {
    let out = symtomo(&["check", "--angles", "64", "--inject-fbp-constant", "1.5"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stdout).contains("fbp-round-trip               FAIL"));

    let first = symtomo(&["check", "--angles", "64", "--seed", "9"]);
    let second = symtomo(&["check", "--angles", "64", "--seed", "9"]);
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn thread_count_comes_from_the_environment() {
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_symtomo"))
            .args(["pauli-demo", "--state", "gaussian:1,0.2", "--grid", GRID])
            .env("TOMO_THREADS", threads)
            .output()
            .unwrap()
    };
    assert_eq!(code(&run("1")), 0);
    assert_eq!(code(&run("zero")), 2);
    assert_eq!(code(&run("0")), 2);
}

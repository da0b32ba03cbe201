use std::fs;
use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

use tempfile::TempDir;

fn defcs(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_defcs"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap()
}

fn with_stdin(args: &[&str], out: &Path, input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_defcs"))
        .args(args)
        .arg("--out")
        .arg(out)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(String::from).collect())
        .collect()
}

fn num(field: &str) -> f64 {
    field.parse().unwrap()
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    assert_eq!(defcs(&["verify"], dir.path()).status.code(), Some(0));
    assert!(json(&dir.path().join("verify.json"))["passed"].as_bool().unwrap());
    assert_eq!(defcs(&["verify", "--inject-fault", "tanh-law"], dir.path()).status.code(), Some(1));
    let report = json(&dir.path().join("verify.json"));
    assert_eq!(report["failing"], serde_json::json!(["tanh-law"]));
    assert_eq!(defcs(&["derive", "--preset", "nope"], dir.path()).status.code(), Some(2));
}

#[test]
fn empty_and_malformed_configs_are_usage_errors() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("job.json");
    fs::write(&cfg, "").unwrap();
    assert_eq!(defcs(&["derive", "--config", cfg.to_str().unwrap()], dir.path()).status.code(), Some(2));
    fs::write(&cfg, r#"{"preset": "su11", "colour": 3}"#).unwrap();
    assert_eq!(defcs(&["derive", "--config", cfg.to_str().unwrap()], dir.path()).status.code(), Some(2));
}

#[test]
fn finite_module_has_no_conjugate() {
    let dir = TempDir::new().unwrap();
    let out = defcs(&["rep", "--preset", "su2"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let out = defcs(&["cs", "--preset", "su2"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("no canonical conjugate on finite module"), "{err}");
}

#[test]
fn higgs_casimir_function() {
    let dir = TempDir::new().unwrap();
    assert!(defcs(&["derive", "--preset", "higgs"], dir.path()).status.success());
    let d = json(&dir.path().join("derive.json"));
    assert_eq!(d["f"], serde_json::json!(["0/1", "2/1", "0/1", "4/1"]));
    // c x(x+1) + h x^2 (x+1)^2 with c = h = 1
    assert_eq!(d["g"], serde_json::json!(["0/1", "1/1", "2/1", "2/1", "1/1"]));
}

#[test]
fn trilinear_coefficient_ratios_follow_the_ladder() {
    let dir = TempDir::new().unwrap();
    let out = with_stdin(&["cs", "--preset", "trilinear", "--config", "-"], dir.path(), r#"{"grid": [[0.25, 0.0]]}"#);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = csv_rows(&dir.path().join("cs_000.csv"));
    assert_eq!(rows.len(), 11);
    let rep = defcs(&["rep", "--preset", "trilinear"], dir.path());
    assert!(rep.status.success());
    let ladder = csv_rows(&dir.path().join("ladder.csv"));
    for k in 1..rows.len() {
        // c_k / c_(k-1) = alpha / sqrt(s[k])
        let ratio = num(&rows[k][1]) / num(&rows[k - 1][1]);
        let want = 0.25 / num(&ladder[k][3]).sqrt();
        assert!((ratio - want).abs() < 1e-12 * want, "level {k}: {ratio} vs {want}");
    }
}

#[test]
fn zero_parameter_gives_vacuum() {
    let dir = TempDir::new().unwrap();
    let out = with_stdin(&["cs", "--preset", "su11", "--config", "-"], dir.path(), r#"{"grid": [[0, 0]]}"#);
    assert!(out.status.success());
    let rows = csv_rows(&dir.path().join("cs_000.csv"));
    assert_eq!(rows.len(), 1);
    assert_eq!(num(&rows[0][1]), 1.0);
}

#[test]
fn moment_outputs() {
    let dir = TempDir::new().unwrap();
    let out = with_stdin(&["moments", "--preset", "su11", "--config", "-"], dir.path(), r#"{"n_max": 0}"#);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(csv_rows(&dir.path().join("moments.csv")).len(), 1);

    let out = defcs(&["moments", "--preset", "quadratic"], dir.path());
    assert!(out.status.success());
    let m = json(&dir.path().join("moments.json"));
    assert!(m["note"].as_str().unwrap().contains("exact moments only"));
    assert_eq!(m["moments"][1], "6/1");

    let out = defcs(&["moments", "--preset", "su11"], dir.path());
    assert!(out.status.success());
    assert!(json(&dir.path().join("moments.json"))["max_rel_err"].as_f64().unwrap() < 1e-6);
}

#[test]
fn realization_check_on_shipped_sectors() {
    let dir = TempDir::new().unwrap();
    for preset in ["pair", "trilinear", "multiphoton(2,2)", "dicke(4,1)"] {
        let out = defcs(&["realization-check", "--preset", preset], dir.path());
        assert_eq!(out.status.code(), Some(0), "{preset}: {}", String::from_utf8_lossy(&out.stdout));
        assert!(json(&dir.path().join("realization-check.json"))["passed"].as_bool().unwrap());
    }
}

#[test]
fn outputs_are_deterministic() {
    let cfg = r#"{"family": "displacement", "grid": [[0.3, 0.2], [1.0, -0.5], [0.0, 0.7]]}"#;
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    assert!(with_stdin(&["cs", "--preset", "su11", "--config", "-", "--workers", "1"], a.path(), cfg).status.success());
    assert!(with_stdin(&["cs", "--preset", "su11", "--config", "-", "--workers", "3"], b.path(), cfg).status.success());
    let mut names: Vec<_> = fs::read_dir(a.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert_eq!(names.len(), 4);
    for n in names {
        assert_eq!(fs::read(a.path().join(&n)).unwrap(), fs::read(b.path().join(&n)).unwrap(), "{n:?}");
    }
}

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn weiltrace(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_weiltrace"))
        .args(args)
        .current_dir(dir)
        .env_remove("APP_CACHE")
        .env_remove("APP_PRECISION")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_str(&stdout(o)).expect("stdout is JSON")
}

#[test]
fn zeros_compute_counts() {
    let dir = tempfile::tempdir().unwrap();
    let o = weiltrace(dir.path(), &["zeros", "compute", "--t-max", "100"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("29 zeros"), "{}", stdout(&o));
}

#[test]
fn zeros_cache_import_export() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let o = weiltrace(d, &["zeros", "export", "z.txt", "--t-max", "60"]);
    assert_eq!(code(&o), 0);
    let o = Command::new(env!("CARGO_BIN_EXE_weiltrace"))
        .args(["zeros", "import", "z.txt"])
        .current_dir(d)
        .env("APP_CACHE", d.join("cache"))
        .output()
        .unwrap();
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(d.join("cache/zeros/zeta.txt").exists());
    // no cache configured
    assert_eq!(code(&weiltrace(d, &["zeros", "import", "z.txt"])), 2);
    // a corrupted zero fails the sign-change check
    let text = std::fs::read_to_string(d.join("z.txt")).unwrap().replace("14.1347", "14.3347");
    std::fs::write(d.join("bad.txt"), text).unwrap();
    assert_eq!(code(&weiltrace(d, &["--zeros-cache", "c", "zeros", "import", "bad.txt"])), 2);
}

#[test]
fn gauss_weil_and_maass_selberg() {
    let dir = tempfile::tempdir().unwrap();
    let o = weiltrace(dir.path(), &["verify", "gauss-weil", "--s", "0.5"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["schema_version"], 1);
    assert!(v["results"][0]["delta"].as_f64().unwrap() <= 1e-8);

    let o = weiltrace(dir.path(), &["verify", "maass-selberg"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["results"].as_array().unwrap().len(), 2);
    assert_eq!(code(&weiltrace(dir.path(), &["verify", "maass-selberg", "--h", "1e-3"])), 2);
}

#[test]
fn zeta_explicit_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let o = weiltrace(d, &["verify", "zeta-explicit"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["status"], "pass");
    assert!(v["results"][0]["residual"].as_f64().unwrap().abs() <= 1e-6);

    let o = weiltrace(d, &["verify", "zeta-explicit", "--tolerance", "1e-30"]);
    assert_eq!(code(&o), 4);
    assert_eq!(json(&o)["status"], "fail");

    assert_eq!(code(&weiltrace(d, &["verify", "zeta-explicit", "--zeros", "missing.txt"])), 2);
    assert_eq!(code(&weiltrace(d, &["verify", "zeta-explicit", "--g", "blob:logr=1"])), 2);
    assert_eq!(code(&weiltrace(d, &["verify", "zeta-explicit", "--variant", "thm_9"])), 2);
    assert_eq!(code(&weiltrace(d, &["verify", "zeta-explicit", "--no-such-flag"])), 2);
}

#[test]
fn config_file_and_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("run.conf"), "# strict\ntolerance = 1e-30\nzeros = compute:300\n").unwrap();
    let o = weiltrace(d, &["--config", "run.conf", "verify", "zeta-explicit"]);
    assert_eq!(code(&o), 4);
    assert_eq!(json(&o)["config"]["zeros"], "compute:300");
    let o = weiltrace(d, &["--config", "run.conf", "--tolerance", "1e-6", "verify", "zeta-explicit"]);
    assert_eq!(code(&o), 0);
    std::fs::write(d.join("broken.conf"), "tolerance\n").unwrap();
    assert_eq!(code(&weiltrace(d, &["--config", "broken.conf", "verify", "gauss-weil"])), 2);

    let o = Command::new(env!("CARGO_BIN_EXE_weiltrace"))
        .args(["verify", "gauss-weil", "--s", "1"])
        .current_dir(d)
        .env("APP_PRECISION", "1e-10")
        .output()
        .unwrap();
    assert_eq!(json(&o)["config"]["precision"].as_f64().unwrap(), 1e-10);
}

#[test]
fn reports_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let args = ["verify", "hecke-explicit", "--chi", "5.1", "--zeros", "compute:60", "--tolerance", "1e-3"];
    let a = weiltrace(d, &args);
    let b = weiltrace(d, &args);
    assert_eq!(code(&a), 0, "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    // 17 significant digits throughout
    let s = stdout(&a);
    let line = s.lines().find(|l| l.contains("\"rhs_total\"")).unwrap();
    let mantissa = line.split(':').nth(1).unwrap().trim().trim_end_matches(',').split('e').next().unwrap();
    assert_eq!(mantissa.trim_start_matches('-').replace('.', "").len(), 17);
}

#[test]
fn hecke_file_source_needs_conjugate() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let o = weiltrace(d, &["zeros", "export", "z51.txt", "--lfunction", "dirichlet:5.1", "--t-max", "30"]);
    assert_eq!(code(&o), 0);
    let o = weiltrace(d, &["verify", "hecke-explicit", "--chi", "5.1", "--zeros", "z51.txt"]);
    assert_eq!(code(&o), 2);
    let o = weiltrace(d, &["verify", "hecke-explicit", "--zeros", "z51.txt"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn bound_sweep_csv() {
    let dir = tempfile::tempdir().unwrap();
    let o = weiltrace(dir.path(), &["bound-sweep", "--T", "1:100:log10"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    let mut lines = out.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let slack = header.iter().position(|&h| h == "slack").unwrap();
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 10);
    for r in &rows {
        assert!(r[slack] >= 0.0);
    }
    // the bound weakens as T grows
    let bound = header.iter().position(|&h| h == "bound").unwrap();
    assert!(rows.windows(2).all(|w| w[1][bound] < w[0][bound]));
    assert_eq!(code(&weiltrace(dir.path(), &["bound-sweep", "--T", "0.5:2:3"])), 2);
}

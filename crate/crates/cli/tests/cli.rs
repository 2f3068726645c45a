use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_juliadim"))
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p
}

fn run(args: &[&str], config: Option<&Path>, out: &Path) -> Output {
    let mut cmd = bin();
    if let Some(c) = config {
        cmd.arg("--config").arg(c);
    }
    cmd.arg("--out").arg(out).args(args);
    cmd.output().unwrap()
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

fn artifacts(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.file_name().unwrap() != "timings.json")
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    v.sort();
    v
}

fn assert_reproducible(sub: &str, config: &str) {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "c.json", config);
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    for out in [&a, &b] {
        let o = run(&["--seed", "11", sub], Some(&cfg), out);
        assert_eq!(o.status.code(), Some(0), "{sub}: {}", String::from_utf8_lossy(&o.stderr));
    }
    let (x, y) = (artifacts(&a), artifacts(&b));
    assert!(x.len() >= 2, "{sub} wrote {x:?}");
    assert_eq!(x.len(), y.len());
    for ((na, da), (nb, db)) in x.iter().zip(&y) {
        assert_eq!(na, nb);
        assert!(da == db, "{sub}: {na} differs between runs");
    }
}

#[test]
fn render_is_reproducible() {
    assert_reproducible(
        "render",
        r#"{"multimap":"pm2","render":{"pixels":120,"julia":{"method":"chaos_game","length":20000}}}"#,
    );
}

#[test]
fn dimension_is_reproducible() {
    assert_reproducible(
        "dimension",
        r#"{"multimap":"cantor3","dimension":{"n_range":[3,6],"julia":{"depth":8}}}"#,
    );
}

#[test]
fn measure_is_reproducible() {
    assert_reproducible(
        "measure",
        r#"{"multimap":"cantor3","measure":{"truncation":6,"bowen_n":6,"centers":10,"julia":{"depth":8}}}"#,
    );
}

#[test]
fn check_is_reproducible() {
    assert_reproducible("check", r#"{"multimap":"pm2","check":{"osc":{"grid":120,"mc_samples":2000}}}"#);
}

#[test]
fn unknown_field_is_schema_error_without_output() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "c.json", r#"{"multimap":"pm2","colour":"red"}"#);
    let out = tmp.path().join("out");
    let o = run(&["render"], Some(&cfg), &out);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn missing_n_range_is_schema_error() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "c.json", r#"{"multimap":"cantor3","dimension":{}}"#);
    let out = tmp.path().join("out");
    assert_eq!(run(&["dimension"], Some(&cfg), &out).status.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn unknown_example_is_schema_error() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "c.json", r#"{"multimap":"nope"}"#);
    assert_eq!(run(&["check"], Some(&cfg), &tmp.path().join("out")).status.code(), Some(2));
}

#[test]
fn zero_workers_is_schema_error() {
    let tmp = TempDir::new().unwrap();
    let o = run(&["--workers", "0", "list-examples"], None, &tmp.path().join("out"));
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn non_decaying_series_is_numerical_failure() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        "c.json",
        r#"{"multimap":"cantor3","measure":{"t":0.6309297535714574,"s":-0.1}}"#,
    );
    let out = tmp.path().join("out");
    let o = run(&["measure"], Some(&cfg), &out);
    assert_eq!(o.status.code(), Some(3));
    let report = read_json(&out.join("report.json"));
    assert!(report["error"].is_object() || report["error"].is_string(), "{report}");
}

#[test]
fn degenerate_family_is_schema_error() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("out");
    let o = run(&["family-c0", "--d1", "2", "--d", "2", "--r", "0.5"], None, &out);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn family_c0_writes_closed_form() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("out");
    let o = run(&["family-c0", "--d1", "2", "--d", "3", "--r", "0.5"], None, &out);
    assert_eq!(o.status.code(), Some(0));
    let v = read_json(&out.join("family_c0.json"));
    let c0 = v["c0"].as_f64().unwrap();
    assert!((c0 / 2f64.powi(-22) - 1.0).abs() < 1e-12, "{c0}");
}

#[test]
fn duplicated_generators_fail_open_set_check() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "c.json", r#"{"multimap":"dup","check":{"osc":{"grid":100,"mc_samples":1000}}}"#);
    let out = tmp.path().join("out");
    let o = run(&["check"], Some(&cfg), &out);
    assert_eq!(o.status.code(), Some(0));
    let v = read_json(&out.join("check.json"));
    assert!(v["osc"]["osc2_violations"].as_u64().unwrap() > 0);
}

#[test]
fn cantor_residual_matches_tail() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        "c.json",
        r#"{"multimap":"cantor3","measure":{"t":0.6309297535714574,"s":0.05,"truncation":8,"centers":10,"julia":{"depth":8}}}"#,
    );
    let out = tmp.path().join("out");
    assert_eq!(run(&["measure"], Some(&cfg), &out).status.code(), Some(0));
    let v = read_json(&out.join("residual.json"));
    let residual = v["residual"]["report"]["residual"].as_f64().unwrap();
    // two maps of contraction 1/3 at t = log2/log3: every level has transfer sum 1
    let (s, n) = (0.05f64, 8i32);
    let norm: f64 = (1..=n).map(|k| (-s * k as f64).exp()).sum();
    let tail = (-s * (n + 1) as f64).exp() / norm;
    assert!((residual - tail).abs() <= 1e-10, "{residual} vs {tail}");
    assert!(v["residual"]["within_tail"].as_bool().unwrap());
}

#[test]
fn list_examples_names_catalog() {
    let o = bin().arg("list-examples").output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let names: Vec<&str> = v.as_array().unwrap().iter().map(|e| e["name"].as_str().unwrap()).collect();
    for n in ["pm2", "cantor3", "dup"] {
        assert!(names.contains(&n), "{names:?}");
    }
}

#[test]
fn outputs_do_not_depend_on_worker_count() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        "c.json",
        r#"{"multimap":"pm2","render":{"pixels":100,"julia":{"method":"chaos_game","length":30000}}}"#,
    );
    let mut seen = Vec::new();
    for workers in ["1", "3"] {
        let out = tmp.path().join(workers);
        let o = run(&["--workers", workers, "--seed", "2", "render"], Some(&cfg), &out);
        assert_eq!(o.status.code(), Some(0));
        seen.push(artifacts(&out));
    }
    assert!(seen[0] == seen[1]);
}

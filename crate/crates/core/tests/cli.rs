//! End-to-end runs of the `pd-limits` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pd-limits")).args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn path_arg(p: &Path) -> &str {
    p.to_str().expect("utf-8 path")
}

#[test]
fn dickman_csv_has_rho_two() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("rho.csv");
    let out = run(&["dickman", "--tmax", "3", "--step", "1e-3", "--out", path_arg(&file)]);
    assert!(out.status.success());
    let text = fs::read_to_string(&file).unwrap();
    assert_eq!(text.lines().next(), Some("t,value"));
    let row = text.lines().find(|l| l.starts_with("2.00000000000e0,")).expect("row at t = 2");
    let value: f64 = row.split(',').nth(1).unwrap().parse().unwrap();
    assert!((value - (1.0 - 2f64.ln())).abs() < 1e-10);
    assert_eq!(text.lines().count(), 1 + 3001);
}

#[test]
fn permutation_moment_is_exact() {
    let v = stdout_json(&run(&["moments", "--family", "permutation", "--n", "100", "--indices", "3,7"]));
    assert_eq!(v["schema"], 1);
    assert_eq!(v["command"], "moments");
    assert_eq!(v["exact"], "1/21");
    assert_eq!(v["ratio"], 1.0);

    let v = stdout_json(&run(&["moments", "--family", "permutation", "--n", "100", "--indices", "3,7", "--float"]));
    assert!((v["value"].as_f64().unwrap() - 1.0 / 21.0).abs() < 1e-14);
    assert!(v["relative_error"].as_f64().unwrap() < 1e-10);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["moments", "--bogus"]).status.code(), Some(2));
    assert_eq!(run(&["sample", "--family", "permutation", "--n", "10"]).status.code(), Some(2));
    assert_eq!(run(&["moments", "--family", "permutation", "--n", "5", "--indices", "6"]).status.code(), Some(2));
    assert_eq!(run(&["dickman", "--tmax", "3", "--step", "0.5"]).status.code(), Some(2));
    assert_eq!(run(&["moments", "--family", "polynomial-multiset-F2", "--phi", "2", "--n", "5", "--indices", "1"]).status.code(), Some(2));
}

#[test]
fn guard_violations_exit_three() {
    let out = run(&["moments", "--family", "permutation", "--n", "20000", "--indices", "1"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(!out.stderr.is_empty());
    let out = run(&["sample", "--family", "permutation", "--n", "20000", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn stochastic_output_is_byte_identical() {
    let sample = ["sample", "--family", "permutation", "--n", "50", "--replicates", "20", "--seed", "9", "--k", "4"];
    let a = run(&sample);
    assert!(a.status.success());
    assert_eq!(a.stdout, run(&sample).stdout);
    assert_eq!(String::from_utf8_lossy(&a.stdout).lines().count(), 21);

    let ks = ["ks", "--family", "pd", "--theta", "1", "--replicates", "1000", "--seed", "3", "--format", "json"];
    let first = run(&ks);
    assert_eq!(first.stdout, run(&ks).stdout);
    let v = stdout_json(&first);
    assert_eq!(v["ks"]["sample_size"], 1000);
    assert!(v["ks"]["statistic"].as_f64().unwrap() < 0.06);
}

#[test]
fn verify_all_subset_passes() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("report.json");
    let out = run(&["verify-all", "--criteria", "1,4", "--out", path_arg(&file)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS")).count(), 2);
    let report: Value = serde_json::from_str(&fs::read_to_string(&file).unwrap()).unwrap();
    assert_eq!(report["schema"], 1);
}

#[test]
fn custom_families_from_files() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("m.csv");
    fs::write(&csv, "i,m_i\n1,1\n2,1\n3,2\n").unwrap();
    let v = stdout_json(&run(&[
        "moments", "--family", "custom", "--kind", "selection", "--m-csv", path_arg(&csv), "--n", "3", "--indices", "1",
    ]));
    assert_eq!(v["exact"], "1/3");

    let desc = dir.path().join("family.json");
    fs::write(&desc, r#"{"kind": "multiset", "phi": "1", "source": "polynomial-multiset", "q": 2}"#).unwrap();
    let v = stdout_json(&run(&["moments", "--family-json", path_arg(&desc), "--n", "8", "--indices", "5"]));
    assert_eq!(v["exact"], "3/16");
}

#[test]
fn coefficients_csv_counts_polynomials() {
    let out = run(&["coeffs", "--family", "polynomial-multiset-F2", "--n", "12", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let last = text.lines().last().unwrap();
    assert_eq!(last, "12,4096");
}

#[test]
fn uniform_family_by_name() {
    let out = run(&["coeffs", "--family", "uniform-1", "--kind", "multiset", "--n", "10", "--format", "csv"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().last(), Some("10,42"));
    assert_eq!(run(&["coeffs", "--family", "uniform-1", "--n", "10"]).status.code(), Some(2));
}

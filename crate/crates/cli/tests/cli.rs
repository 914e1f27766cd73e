use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn unanimity(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_unanimity"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path_arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .skip(1)
        .map(|l| l.split(',').map(String::from).collect())
        .collect()
}

#[test]
fn simulate_writes_rows_and_sidecar_and_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("disk.csv");
    let args = [
        "simulate",
        "--domain",
        "disk",
        "--rounds",
        "3000",
        "--trials",
        "20",
        "--seed",
        "7",
        "--out",
        path_arg(&out),
    ];
    assert_eq!(unanimity(&args).status.code(), Some(0));
    let first = std::fs::read(&out).unwrap();
    let text = String::from_utf8(first.clone()).unwrap();
    assert!(text.starts_with("round,mean_size,stderr_size,acceptance_rate\n"));
    assert_eq!(text.lines().count(), 3002);
    let side = read_json(&dir.path().join("disk.csv.json"));
    assert_eq!(side["seed"], 7);
    assert_eq!(side["config"]["rounds"], 3000);
    assert_eq!(side["trials"], 20);

    assert_eq!(unanimity(&args).status.code(), Some(0));
    assert_eq!(std::fs::read(&out).unwrap(), first);

    let other = dir.path().join("disk8.csv");
    let out8 = Command::new(env!("CARGO_BIN_EXE_unanimity"))
        .env("UNANIMITY_WORKERS", "8")
        .args([
            "simulate",
            "--domain",
            "disk",
            "--rounds",
            "3000",
            "--trials",
            "20",
            "--seed",
            "7",
            "--out",
            path_arg(&other),
        ])
        .output()
        .unwrap();
    assert_eq!(out8.status.code(), Some(0));
    assert_eq!(std::fs::read(&other).unwrap(), first);
    assert!(!dir.path().join("disk.csv.partial").exists());
}

#[test]
fn zero_seed_is_derived_and_recorded() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let o = unanimity(&[
            "simulate",
            "--domain",
            "square",
            "--rounds",
            "200",
            "--trials",
            "4",
            "--out",
            path_arg(p),
        ]);
        assert_eq!(o.status.code(), Some(0));
    }
    let (sa, sb) = (
        read_json(&dir.path().join("a.csv.json")),
        read_json(&dir.path().join("b.csv.json")),
    );
    assert_eq!(sa["seed_derived"], true);
    assert_ne!(sa["seed"], 0);
    // The output path is part of the configuration.
    assert_ne!(sa["seed"], sb["seed"]);
}

#[test]
fn interval_final_size_is_in_sanity_window() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("interval.csv");
    let o = unanimity(&[
        "simulate",
        "--domain",
        "interval",
        "--rounds",
        "10000",
        "--trials",
        "100",
        "--seed",
        "3",
        "--out",
        path_arg(&out),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&out).unwrap();
    let last = rows(&text).pop().unwrap();
    let mean: f64 = last[1].parse().unwrap();
    assert!((2.0..=40.0).contains(&mean), "{mean}");
}

#[test]
fn fit_reports_exponents() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("disk.csv");
    let o = unanimity(&[
        "simulate",
        "--domain",
        "disk",
        "--rounds",
        "20000",
        "--trials",
        "40",
        "--seed",
        "5",
        "--out",
        path_arg(&out),
    ]);
    assert_eq!(o.status.code(), Some(0));

    let o = unanimity(&["fit", "--model", "power", "--input", path_arg(&out)]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["beta"].as_f64().unwrap() > 0.0);
    assert_eq!(v["model"], "power");

    let o = unanimity(&["fit", "--model", "decay", "--input", path_arg(&out)]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["gamma"].as_f64().unwrap() > 0.0);
    assert_eq!(v["trials"], 40);

    let report = dir.path().join("cmp.json");
    let o = unanimity(&[
        "fit",
        "--model",
        "compare",
        "--input",
        path_arg(&out),
        "--out",
        path_arg(&report),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(read_json(&report)["ranking"].as_array().unwrap().len(), 3);
}

#[test]
fn fit_needs_enough_points() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("short.csv");
    assert_eq!(
        unanimity(&[
            "simulate",
            "--domain",
            "disk",
            "--rounds",
            "150",
            "--trials",
            "2",
            "--seed",
            "1",
            "--out",
            path_arg(&out)
        ])
        .status
        .code(),
        Some(0)
    );
    let o = unanimity(&["fit", "--model", "log", "--input", path_arg(&out)]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn capprob_dual_rows_agree() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("dual.csv");
    let o = unanimity(&[
        "capprob",
        "--suite",
        "dual",
        "--domain",
        "disk",
        "--delta",
        "0.7",
        "--samples",
        "200000",
        "--outer",
        "300",
        "--inner",
        "300",
        "--seed",
        "4",
        "--out",
        path_arg(&out),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("cap_param,method,value,stderr,samples\n"));
    let r = rows(&text);
    assert_eq!(r.len(), 2);
    assert_eq!((r[0][1].as_str(), r[1][1].as_str()), ("event", "integral"));
    let f = |row: &Vec<String>, i: usize| row[i].parse::<f64>().unwrap();
    let z = (f(&r[0], 2) - f(&r[1], 2)).abs() / (f(&r[0], 3).powi(2) + f(&r[1], 3).powi(2)).sqrt();
    assert!(z < 3.0, "{z}");
}

#[test]
fn capprob_ratio_suites() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("l41.csv");
    let o = unanimity(&[
        "capprob",
        "--suite",
        "lemma41",
        "--delta",
        "0.04,0.125",
        "--samples",
        "20000",
        "--seed",
        "2",
        "--out",
        path_arg(&out),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(rows(&std::fs::read_to_string(&out).unwrap()).len(), 4);

    let out = dir.path().join("l43.csv");
    let o = unanimity(&[
        "capprob",
        "--suite",
        "lemma43",
        "--ab",
        "0.25:0.25,0.1:0.8",
        "--samples",
        "50000",
        "--seed",
        "2",
        "--out",
        path_arg(&out),
    ]);
    assert_eq!(o.status.code(), Some(0));
    for r in rows(&std::fs::read_to_string(&out).unwrap())
        .iter()
        .filter(|r| r[1] == "ratio")
    {
        assert!(r[2].parse::<f64>().unwrap() >= 1.0);
    }
}

#[test]
fn usage_errors_exit_with_two_and_leave_no_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("bad.csv");
    let o = path_arg(&out);
    let cases: Vec<Vec<&str>> = vec![
        vec![
            "capprob", "--suite", "lemma41", "--delta", "0.2", "--out", o,
        ],
        vec!["capprob", "--suite", "lemma41", "--out", o],
        vec![
            "capprob", "--suite", "lemma43", "--ab", "0.5:0.25", "--out", o,
        ],
        vec!["capprob", "--suite", "dual", "--out", o],
        vec![
            "simulate", "--domain", "disk", "--rounds", "0", "--trials", "3", "--out", o,
        ],
        vec![
            "simulate", "--domain", "cube", "--rounds", "10", "--trials", "3", "--out", o,
        ],
        vec![
            "phi",
            "--domain",
            "disk",
            "--lambda",
            "0.01,0.001",
            "--out",
            o,
        ],
        vec![
            "phi", "--domain", "interval", "--lambda", "0.01", "--out", o,
        ],
        vec!["phi", "--domain", "disk", "--out", o],
        vec!["verify", "--suite", "nonsense"],
        vec!["frobnicate"],
    ];
    for args in cases {
        assert_eq!(unanimity(&args).status.code(), Some(2), "{args:?}");
        assert!(!out.exists(), "{args:?}");
    }
}

#[test]
fn phi_and_bound_tables() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("phi.csv");
    let o = unanimity(&[
        "phi",
        "--domain",
        "disk",
        "--lambda",
        "0,0.001,0.01,1",
        "--pairs",
        "100000",
        "--seed",
        "3",
        "--out",
        path_arg(&out),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let r = rows(&std::fs::read_to_string(&out).unwrap());
    let vals: Vec<f64> = r.iter().map(|x| x[1].parse().unwrap()).collect();
    assert_eq!(vals[0], 0.0);
    assert_eq!(vals[3], 1.0);
    assert!(vals.windows(2).all(|w| w[0] <= w[1]));

    let out = dir.path().join("bound.csv");
    let o = unanimity(&[
        "phi",
        "--domain",
        "square",
        "--t",
        "0,100,10000",
        "--pairs",
        "100000",
        "--seed",
        "3",
        "--out",
        path_arg(&out),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let r = rows(&std::fs::read_to_string(&out).unwrap());
    assert_eq!(r[0][1].parse::<f64>().unwrap(), 1.0);
}

#[test]
fn verify_predicates_and_triangle_bound_pass() {
    for suite in ["predicates", "lemma43"] {
        let o = unanimity(&["verify", "--suite", suite]);
        assert_eq!(
            o.status.code(),
            Some(0),
            "{}",
            String::from_utf8_lossy(&o.stderr)
        );
        let v: Value = serde_json::from_slice(&o.stdout).unwrap();
        assert_eq!(v["passed"], true);
        let checks = v["suites"][0]["checks"].as_array().unwrap();
        assert!(!checks.is_empty());
        for c in checks {
            assert!(c["observed"].is_number() && c["threshold"].is_string());
        }
    }
}

#[test]
fn verify_reports_failure_with_exit_one() {
    // The disk growth windows are not met at these sizes.
    let o = unanimity(&["verify", "--suite", "disk", "--quick"]);
    assert_eq!(o.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["passed"], false);
}

//! End-to-end runs of the `bellmzi` binary on small campaigns.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use bellmzi_core::store;

fn bellmzi(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bellmzi"))
        .current_dir(dir)
        .env("SOURCE_DATE_EPOCH", "1700000000")
        .env("BELLMZI_RESULTS_DIR", dir.join("results"))
        .args(args)
        .output()
        .expect("spawn bellmzi")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["optimize", "general", "--n", "1"][..],
        &["optimize", "general", "--n", "2", "--restarts", "0"],
        &["optimize", "quantum", "--n", "2"],
        &["scan", "tmsv-r", "--n", "2", "--r-min", "2", "--r-max", "1"],
        &["frobnicate"],
    ] {
        let out = bellmzi(dir.path(), args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
    assert_eq!(bellmzi(dir.path(), &["--help"]).status.code(), Some(0));
}

#[test]
fn optimize_writes_the_default_layout() {
    let dir = tempfile::tempdir().unwrap();
    let out = bellmzi(dir.path(), &["optimize", "tmsv", "--n", "2-3", "--restarts", "4", "--seed", "9"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let path = text.lines().next().unwrap();
    assert!(path.ends_with("tmsv/2-3_9.json"), "{path}");
    let record = store::load(Path::new(path)).unwrap();
    assert_eq!(record.runs.len(), 2);
    assert_eq!(record.created_at, 1_700_000_000);
    let summary: serde_json::Value = serde_json::from_str(text.lines().last().unwrap()).unwrap();
    assert_eq!(summary["checksum"], record.checksum().unwrap());
}

#[test]
fn records_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["optimize", "ecs", "--n", "2-3", "--restarts", "3", "--seed", "4", "--out"];
    let run = |name: &str| {
        let mut a = args.to_vec();
        a.push(name);
        assert!(bellmzi(dir.path(), &a).status.success());
        fs::read(dir.path().join(name)).unwrap()
    };
    assert_eq!(run("a.json"), run("b.json"));
}

#[test]
fn corrupted_records_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    assert!(bellmzi(dir.path(), &["optimize", "general", "--n", "2", "--restarts", "3", "--out", "g.json"])
        .status
        .success());
    let path = dir.path().join("g.json");
    let text = fs::read_to_string(&path).unwrap();
    fs::write(&path, text.replacen("0.8284", "0.9284", 1)).unwrap();
    let out = bellmzi(dir.path(), &["analyze", "eigvec", "--in", "g.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("checksum"));
}

#[test]
fn report_and_plots_from_stored_records() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert!(bellmzi(d, &["optimize", "general", "--n", "2-5", "--restarts", "4", "--out", "data/general.json"])
        .status
        .success());
    assert!(bellmzi(d, &["fit", "--in", "data/general.json", "--model", "three", "--out", "data/fit.json"])
        .status
        .success());
    assert!(bellmzi(
        d,
        &["scan", "tmsv-r", "--n", "2", "--steps", "4", "--restarts", "3", "--out", "data/scan.json"]
    )
    .status
    .success());

    let out = bellmzi(d, &["report", "--in", "data", "--out", "tables"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let mut names: Vec<String> = fs::read_dir(d.join("tables"))
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    for expected in [
        "general_general_curve.csv",
        "general_general_eigvec.csv",
        "general_general_schmidt.csv",
        "fit_fit_fit.csv",
        "tmsv_r_scan_scan_r_scan.csv",
    ] {
        assert!(names.iter().any(|n| n == expected), "{expected} missing from {names:?}");
    }
    let curve = fs::read_to_string(d.join("tables/general_general_curve.csv")).unwrap();
    assert_eq!(curve.lines().count(), 5);

    let specs = [
        r#"{"kind": "curve", "inputs": ["data/fit.json"], "output": "curve.svg"}"#,
        r#"{"kind": "displacements", "inputs": ["data/general.json"], "output": "disp.svg", "n": 3}"#,
        r#"{"kind": "eigvec_heatmap", "inputs": ["data/general.json"], "output": "heat.svg", "n": 4}"#,
        r#"{"kind": "schmidt_bars", "inputs": ["data/general.json"], "output": "bars.svg", "n": 5}"#,
        r#"{"kind": "violation_vs_r", "inputs": ["data/scan.json"], "output": "scan.svg"}"#,
    ];
    for (k, spec) in specs.iter().enumerate() {
        let spec_path = d.join(format!("spec{k}.json"));
        fs::write(&spec_path, spec).unwrap();
        let out = bellmzi(d, &["plot", "--spec", spec_path.to_str().unwrap()]);
        assert!(out.status.success(), "{spec}: {}", String::from_utf8_lossy(&out.stderr));
    }
    let svg = fs::read_to_string(d.join("curve.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));

    // a plot kind that does not fit its input is a usage error
    let bad = d.join("bad.json");
    fs::write(&bad, r#"{"kind": "violation_vs_r", "inputs": ["data/general.json"], "output": "x.svg"}"#).unwrap();
    assert_eq!(bellmzi(d, &["plot", "--spec", bad.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn validation_commands_report_success() {
    let dir = tempfile::tempdir().unwrap();
    let out = bellmzi(dir.path(), &["validate", "closed-forms", "--samples", "5", "--seed", "3"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("\"passed\":true"));
    let out = bellmzi(dir.path(), &["validate", "dephased", "--n", "2", "--restarts", "4"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

use std::process::Command;

use bellbidir::cli::{run_verification, VerifyConfig};
use bellbidir::protocols::CorrectionAssignment;
use serde_json::Value;

fn bellbidir(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_bellbidir")).args(args).output().expect("binary runs")
}

#[test]
fn sweep_headers_and_row_counts() {
    let cases = [
        ("3a", "p1,p2,F_ab,F_ba", 16),
        ("3b", "p,F_ab,F_ba", 4),
        ("3c", "t,F", 4),
        ("4", "t,i_aux,i_tot,i_class,discord,concurrence,i_coh,min_pt_eig,entanglement_breaking", 4),
    ];
    for (fig, header, rows) in cases {
        let out = bellbidir(&["sweep", "--figure", fig, "--points", "4"]);
        assert!(out.status.success());
        let text = String::from_utf8(out.stdout).unwrap();
        assert!(!text.contains('\r'));
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], header);
        assert_eq!(lines.len() - 1, rows, "figure {fig}");
    }
}

#[test]
fn sweep_writes_file_and_rows_ascend() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig3c.csv");
    let out = bellbidir(&["sweep", "--figure", "3c", "--points", "11", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let rows: Vec<(f64, f64)> = text
        .lines()
        .skip(1)
        .map(|l| {
            let (t, f) = l.split_once(',').unwrap();
            (t.parse().unwrap(), f.parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 11);
    assert!(rows.windows(2).all(|w| w[0].0 < w[1].0 && w[0].1 > w[1].1));
    for (t, f) in rows {
        assert!((f - (0.75 - t / 8.0)).abs() < 1e-11);
    }
}

#[test]
fn simulate_json_report() {
    let out = bellbidir(&["simulate", "--scheme", "independent", "--p1", "0.5", "--p2", "0.5"]);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["scheme"], "independent");
    assert_eq!(v["params"]["direction"], "ab");
    assert!((v["q"].as_f64().unwrap() - 0.25).abs() < 1e-10);
    assert!((v["fidelity"].as_f64().unwrap() - 0.625).abs() < 1e-10);
    assert_eq!(v["choi"]["re"].as_array().unwrap().len(), 4);
    assert_eq!(v["tool_version"], env!("CARGO_PKG_VERSION"));
    assert!(v["info"]["i_tot"].as_f64().unwrap() > 0.0);
}

#[test]
fn simulate_common_direction_ba() {
    let out = bellbidir(&["simulate", "--scheme", "common", "--p", "0.25", "--direction", "ba", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    let q: f64 = row[header.iter().position(|h| *h == "q").unwrap()].parse().unwrap();
    assert!((q - 0.75).abs() < 1e-10);
}

#[test]
fn invalid_parameters_exit_with_usage_code() {
    assert_eq!(bellbidir(&["simulate", "--t", "1.5"]).status.code(), Some(2));
    assert_eq!(bellbidir(&["simulate", "--p1", "-0.1", "--scheme", "independent"]).status.code(), Some(2));
    assert_eq!(bellbidir(&["sweep", "--figure", "5"]).status.code(), Some(2));
    assert_eq!(bellbidir(&["sweep", "--figure", "4", "--points", "1"]).status.code(), Some(2));
    assert_eq!(bellbidir(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn unwritable_output_exits_with_io_code() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("missing").join("out.csv");
    let out = bellbidir(&["sweep", "--figure", "3b", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn verify_passes() {
    let out = bellbidir(&["verify", "--grid", "5", "--trajectories", "2000"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().all(|l| l.starts_with("PASS")));
}

#[test]
fn verify_catches_swapped_corrections() {
    let cfg = VerifyConfig { grid: 3, trajectories: 2000, assignment: CorrectionAssignment::Swapped, ..VerifyConfig::default() };
    let checks = run_verification(&cfg).unwrap();
    let channel = checks.iter().find(|c| c.name.starts_with("independent scheme channel")).unwrap();
    assert!(!channel.passed(), "max deviation {}", channel.max_deviation);
}

#[test]
fn reruns_are_byte_identical() {
    let args = ["sweep", "--figure", "4", "--points", "7", "--format", "json"];
    assert_eq!(bellbidir(&args).stdout, bellbidir(&args).stdout);
}

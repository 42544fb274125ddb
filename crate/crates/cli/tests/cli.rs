use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn qdeg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qdeg")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn degradable_family_member_has_zero_epsilon() {
    let v = json(&qdeg(&["epsilon", "--family", "amplitude-damping", "--gamma", "0.3"]));
    assert!(v["epsilon"].as_f64().unwrap() <= 1e-6);
    assert_eq!(v["anti"], false);
}

#[test]
fn anti_flag_selects_antidegradability() {
    let v = json(&qdeg(&["epsilon", "--family", "erasure", "--p", "0.7", "--anti"]));
    assert!(v["epsilon"].as_f64().unwrap() <= 1e-6);
    assert_eq!(v["anti"], true);
}

#[test]
fn missing_channel_file_is_a_validation_error() {
    let out = qdeg(&["epsilon", "--channel", "no/such/channel.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("no/such/channel.json"), "{}", stderr(&out));
}

#[test]
fn missing_family_parameter_is_reported() {
    let out = qdeg(&["epsilon", "--family", "bb84", "--p-x", "0.01"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("--p-z"));
}

#[test]
fn out_of_range_tolerance_is_rejected() {
    for tol in ["0", "0.5", "-1e-8"] {
        let out = qdeg(&["epsilon", "--family", "depolarizing", "--p", "0.05", &format!("--tol={tol}")]);
        assert_eq!(out.status.code(), Some(2), "tol {tol}");
    }
}

#[test]
fn source_flags_conflict() {
    let out = qdeg(&["q1", "--channel", "x.json", "--family", "depolarizing", "--p", "0.1"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(qdeg(&["q1"]).status.code(), Some(2));
    assert_eq!(qdeg(&["--help"]).status.code(), Some(0));
}

#[test]
fn export_then_diamond_distance() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for (path, p) in [(&a, "0"), (&b, "0.1")] {
        let out = qdeg(&["export", "--family", "depolarizing", "--p", p, "--out", path.to_str().unwrap()]);
        assert!(out.status.success(), "{}", stderr(&out));
    }
    let v = json(&qdeg(&["diamond", "--a", a.to_str().unwrap(), "--b", b.to_str().unwrap()]));
    assert!((v["diamond_distance"].as_f64().unwrap() - 0.2).abs() < 1e-6);

    let v = json(&qdeg(&["epsilon", "--channel", b.to_str().unwrap()]));
    assert!(v["epsilon"].as_f64().unwrap() > 0.0);
}

#[test]
fn q1_of_depolarizing_channel() {
    let v = json(&qdeg(&["q1", "--family", "depolarizing", "--p", "0.05", "--starts", "3"]));
    assert!((v["value"].as_f64().unwrap() - 0.6343549).abs() < 1e-6);
}

#[test]
fn bounds_dominate_q1() {
    let v = json(&qdeg(&["bounds", "--family", "depolarizing", "--p", "0.05", "--starts", "2"]));
    let q1 = v["q1"].as_f64().unwrap();
    for key in ["q_upper_thm1_i", "q_upper_thm1_ii", "p_upper_thm1_iii", "p_upper_thm1_iv", "p1_upper_thm1_v"] {
        assert!(v[key].as_f64().unwrap() >= q1 - 1e-9, "{key}");
    }
    assert!(v["terms"]["epsilon"].as_f64().unwrap() > 0.0);
}

fn read_rows(path: &Path) -> Vec<csv::StringRecord> {
    let mut reader = csv::Reader::from_path(path).unwrap();
    let header = reader.headers().unwrap().clone();
    assert_eq!(&header[0], "param");
    assert_eq!(header.iter().last(), Some("status"));
    reader.records().map(|r| r.unwrap()).collect()
}

#[test]
fn depolarizing_sweep_writes_csv_and_meta() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("dep.csv");
    let status = qdeg(&[
        "sweep", "--family", "depolarizing", "--from", "0", "--to", "0.02", "--steps", "3", "--out",
        out.to_str().unwrap(), "--workers", "2", "--meta",
    ]);
    assert!(status.status.success(), "{}", stderr(&status));
    let rows = read_rows(&out);
    assert_eq!(rows.len(), 3);
    let mut reader = csv::Reader::from_path(&out).unwrap();
    let hull_col = reader.headers().unwrap().iter().position(|h| h == "hull").unwrap();
    let hull: f64 = rows[1][hull_col].parse().unwrap();
    assert!((hull - 0.9069).abs() < 2e-3, "hull(0.01) = {hull}");
    assert!(dir.path().join("dep.csv.meta.json").exists());
}

#[test]
fn sweep_rejects_reversed_range() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    let status = qdeg(&["sweep", "--family", "bb84", "--from", "0.1", "--to", "0", "--steps", "3", "--out", out.to_str().unwrap()]);
    assert_eq!(status.status.code(), Some(2));
}

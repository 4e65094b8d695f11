use std::path::Path;
use std::process::{Command, Output};

use channel_resource::objects::{ChannelSpec, QuantumChannel};

fn chanres(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chanres"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_spec(dir: &Path, name: &str, channel: &QuantumChannel) -> String {
    let path = dir.join(format!("{name}.json"));
    std::fs::write(&path, ChannelSpec::from_channel(channel, Some(name.into())).to_json()).unwrap();
    path.to_string_lossy().into_owned()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn analyze_hadamard_reports_half() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), "hadamard", &QuantumChannel::hadamard());
    let out = chanres(&["analyze", "--input", &spec, "--restarts", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!((v["generating_power"].as_f64().unwrap() - 0.5).abs() < 1e-9);
    assert_eq!(v["is_mio"], false);
    assert_eq!(v["header"]["rng"], "ChaCha8Rng");
}

#[test]
fn analyze_dephasing_is_free() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), "dephasing", &QuantumChannel::dephasing(3));
    let out = chanres(&["analyze", "--input", &spec, "--dim", "3", "--restarts", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["generating_power"].as_f64().unwrap(), 0.0);
    assert!(v["increasing_power_search"].as_f64().unwrap().abs() < 1e-9);
    assert_eq!(v["is_mio"], true);
    assert_eq!(v["is_dio"], true);
}

#[test]
fn malformed_spec_exits_2_and_names_field() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"dim_in": 2, "repr": "kraus", "data": []}"#).unwrap();
    let out = chanres(&["analyze", "--input", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("dim_out"));
}

#[test]
fn non_cptp_spec_exits_2_and_names_invariant() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("leaky.json");
    std::fs::write(
        &path,
        r#"{"dim_in": 2, "dim_out": 2, "repr": "kraus", "data": [[[[1,0],[0,0]],[[0,0],[0.5,0]]]]}"#,
    )
    .unwrap();
    let out = chanres(&["analyze", "--input", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("kraus_completeness"));
}

#[test]
fn verify_incoherent_measurement_suite_passes() {
    let out = chanres(&["verify", "thm9", "--dim", "2", "--trials", "10"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["passed"], true);
    for t in v["trials"].as_array().unwrap() {
        assert!((t["values"]["witness_value"].as_f64().unwrap() - 0.5).abs() <= 1e-8);
    }
}

#[test]
fn verify_bounds_on_qutrits() {
    let out = chanres(&["verify", "bounds", "--dim", "3", "--trials", "10", "--out", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("index,label,passed,violation,slack,"));
    assert_eq!(text.lines().count(), 11);
}

#[test]
fn invalid_options_exit_2() {
    assert_eq!(chanres(&["verify", "thm2", "--tol", "1e-12"]).status.code(), Some(2));
    assert_eq!(chanres(&["verify", "thm7"]).status.code(), Some(2));
    assert_eq!(chanres(&["verify", "prop1", "--restarts", "0"]).status.code(), Some(2));
    assert_eq!(chanres(&["verify", "qubit-closed-form", "--dim", "3"]).status.code(), Some(2));
}

#[test]
fn sweep_csv_rows() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), "dephasing", &QuantumChannel::dephasing(2));
    let out = chanres(&["sweep", "--input", &spec, "--trials", "3", "--restarts", "1", "--out", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 4);
    assert_eq!(&rows[0][0], "dephasing");
    assert_eq!(&rows[0][1], "0");
    for r in &rows[1..] {
        let w: f64 = r[1].parse().unwrap();
        let closed: f64 = r[2].parse().unwrap();
        assert!((w - closed).abs() < 1e-6);
    }
}

#[test]
fn empty_sweep_is_header_only() {
    let out = chanres(&["sweep", "--trials", "0", "--out", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 1);
}

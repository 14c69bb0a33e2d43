use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name)
}

fn epmodem(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_epmodem")).args(args).output().expect("spawn epmodem")
}

fn summary(path: &Path) -> Value {
    let v: Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    v["summary"].clone()
}

/// CSV body without the `#` header lines.
fn body(path: &Path) -> String {
    fs::read_to_string(path).unwrap().lines().filter(|l| !l.starts_with('#')).collect::<Vec<_>>().join("\n")
}

#[test]
fn fig12_decodes_every_frame() {
    let dir = tempfile::tempdir().unwrap();
    let out = epmodem(&[
        "run",
        "--scenario",
        scenario("fig12.json").to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(stdout.matches("L1: message at").count(), 2, "{stdout}");
    assert_eq!(stdout.matches("L2: message at").count(), 1, "{stdout}");
    assert!(!stdout.contains("L3: message at"), "{stdout}");
    for f in ["trace.csv", "summary.json", "messages.jsonl", "manifest.json"] {
        assert!(dir.path().join(f).is_file(), "{f} missing");
    }
    let s = summary(&dir.path().join("summary.json"));
    assert_eq!(s["bit_errors"], 0);
    assert_eq!(s["all_decoded"], true);

    let trace = fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    let mut lines = trace.lines();
    assert!(lines.next().unwrap().starts_with("# seed=12"));
    assert!(lines.next().unwrap().starts_with("# scenario_hash="));
    assert!(lines.next().unwrap().starts_with("# version="));
    assert!(lines.next().unwrap().starts_with("time_s,"));
}

#[test]
fn loopback_has_zero_ber_and_writes_probes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let out = epmodem(&[
        "run",
        "--scenario",
        scenario("loopback.json").to_str().unwrap(),
        "--out",
        d,
        "--probes",
        "agc_out,phase_acc",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let s = summary(&dir.path().join("summary.json"));
    assert_eq!(s["ber"], 0.0);
    assert!(s["bits"].as_u64().unwrap() > 0);
    let probes = body(&dir.path().join("probes_L1.csv"));
    assert_eq!(probes.lines().next().unwrap(), "time_s,agc_out,phase_acc");
}

#[test]
fn reruns_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let out = epmodem(&[
            "run",
            "--scenario",
            scenario("loopback.json").to_str().unwrap(),
            "--out",
            d.path().to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
    }
    for f in ["trace.csv", "summary.json", "messages.jsonl"] {
        assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap(), "{f}");
    }
}

#[test]
fn seed_override_is_recorded() {
    let dir = tempfile::tempdir().unwrap();
    let out = epmodem(&[
        "run",
        "--scenario",
        scenario("loopback.json").to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
        "--seed",
        "99",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let trace = fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    assert!(trace.starts_with("# seed=99\n"));
}

#[test]
fn json_format() {
    let dir = tempfile::tempdir().unwrap();
    let out =
        epmodem(&["blocktest", "agc", "--duration", "0.2", "--out", dir.path().to_str().unwrap(), "--format", "json"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("agc.json")).unwrap()).unwrap();
    assert!(v["seed"].is_number());
}

#[test]
fn missing_scenario_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = epmodem(&["run", "--scenario", "/nonexistent/scenario.json", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn malformed_scenario_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    fs::write(&path, r#"{"loads": [], "tx_schedule": [], "sim_duration_s": 0.1, "surprise": 1}"#).unwrap();
    let out = epmodem(&["run", "--scenario", path.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_block_exits_2() {
    assert_eq!(epmodem(&["blocktest", "equalizer"]).status.code(), Some(2));
}

#[test]
fn unknown_probe_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out =
        epmodem(&["blocktest", "agc", "--duration", "0.1", "--probes", "nope", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nope"));
}

#[test]
fn framesync_rejects_foreign_code() {
    let dir = tempfile::tempdir().unwrap();
    let out = epmodem(&[
        "blocktest",
        "framesync",
        "--code",
        "5",
        "--stimulus-code",
        "3",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let s = summary(&dir.path().join("framesync_summary.json"));
    assert_eq!(s["detections"].as_array().unwrap().len(), 0);
    assert!(body(&dir.path().join("framesync.csv")).starts_with("time_s,corr_metric"));
}

#[test]
fn carrier_blocktest_converges() {
    let dir = tempfile::tempdir().unwrap();
    let out = epmodem(&["blocktest", "carrier", "--phase-offset", "0.5236", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let s = summary(&dir.path().join("carrier_summary.json"));
    let acc = s["final_phase_acc"].as_f64().unwrap();
    assert!((acc - std::f64::consts::FRAC_PI_6).abs() < 0.02, "phase_acc {acc}");
}

#[test]
fn ber_sweep_writes_one_row_per_snr() {
    let dir = tempfile::tempdir().unwrap();
    let out = epmodem(&[
        "ber-sweep",
        "--snr=-inf,20",
        "--seeds",
        "2",
        "--frames",
        "4",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = body(&dir.path().join("ber_sweep.csv"));
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 2, "{csv}");
    assert!(rows[0].starts_with("-inf,"));
    let s = summary(&dir.path().join("ber_sweep_summary.json"));
    assert_eq!(s[1]["ber"], 0.0);
    assert_eq!(s[0]["detected"], 0);
}

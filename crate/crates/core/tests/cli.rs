//! End-to-end tests of the `qbattery` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn run(command: &str, config: &Path, out: &Path, seed: Option<u64>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_qbattery"));
    cmd.arg(command)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out);
    if let Some(s) = seed {
        cmd.arg("--seed").arg(s.to_string());
    }
    cmd.output().expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn stderr_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stderr).expect("stderr is JSON")
}

fn command_for(name: &str) -> &'static str {
    match name.split('_').next().unwrap() {
        "bloch" => "bloch-grid",
        "protocol" => "protocol-report",
        "haar" => "haar",
        "flow" => "flow",
        other => panic!("unknown config prefix {other}"),
    }
}

#[test]
fn shipped_configs_pass() {
    let dir = tempfile::tempdir().unwrap();
    let mut entries: Vec<_> = std::fs::read_dir(configs_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    entries.sort();
    assert!(entries.len() >= 10);
    for cfg in entries {
        let stem = cfg.file_stem().unwrap().to_str().unwrap().to_string();
        let cmd = command_for(&stem);
        let ext = if cmd == "bloch-grid" { "csv" } else { "json" };
        let out = dir.path().join(format!("{stem}.{ext}"));
        let res = run(cmd, &cfg, &out, None);
        assert!(
            res.status.success(),
            "{stem}: exit {:?}, stderr {}",
            res.status.code(),
            String::from_utf8_lossy(&res.stderr)
        );
        assert!(out.exists());
    }
}

#[test]
fn outputs_are_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    for (cmd, cfg, ext) in [
        ("bloch-grid", "bloch_general.json", "csv"),
        ("protocol-report", "protocol_n4.json", "json"),
        ("haar", "haar_random_cptp.json", "json"),
        ("flow", "flow_random_local.json", "json"),
    ] {
        let a = dir.path().join(format!("a_{cfg}.{ext}"));
        let b = dir.path().join(format!("b_{cfg}.{ext}"));
        assert!(run(cmd, &configs_dir().join(cfg), &a, None)
            .status
            .success());
        assert!(run(cmd, &configs_dir().join(cfg), &b, None)
            .status
            .success());
        assert_eq!(
            std::fs::read(&a).unwrap(),
            std::fs::read(&b).unwrap(),
            "{cfg}"
        );
        let companion = match cmd {
            "bloch-grid" => Some("summary.json"),
            "protocol-report" => Some("table.csv"),
            _ => None,
        };
        if let Some(suffix) = companion {
            assert_eq!(
                std::fs::read(a.with_extension(suffix)).unwrap(),
                std::fs::read(b.with_extension(suffix)).unwrap()
            );
        }
    }
}

#[test]
fn seed_flag_overrides_config_and_is_recorded() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs_dir().join("haar_random_cptp.json");
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    assert!(run("haar", &cfg, &a, None).status.success());
    assert!(run("haar", &cfg, &b, Some(99)).status.success());
    let ja: Value = serde_json::from_slice(&std::fs::read(&a).unwrap()).unwrap();
    let jb: Value = serde_json::from_slice(&std::fs::read(&b).unwrap()).unwrap();
    assert_eq!(ja["provenance"]["seed"], 6);
    assert_eq!(jb["provenance"]["seed"], 99);
    assert_ne!(ja["results"]["mc"]["mean"], jb["results"]["mc"]["mean"]);
    assert_eq!(
        ja["provenance"]["config_sha256"],
        jb["provenance"]["config_sha256"]
    );
    assert_eq!(ja["provenance"]["version"], env!("CARGO_PKG_VERSION"));
}

#[test]
fn csv_format() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "grid.json",
        r#"{"unitary":{"a":[0.6,0.0],"b":[0.0,0.8],"phase":0.3},"grid":{"cos_theta":4,"phi":3,"radius":2},"seed":1}"#,
    );
    let out = dir.path().join("grid.csv");
    assert!(run("bloch-grid", &cfg, &out, None).status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(!text.contains('\r'));
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("# qbattery "));
    assert!(lines[0].contains("config_sha256=") && lines[0].ends_with("seed=1"));
    assert_eq!(lines[1], "theta,phi,r,deltaE_closed_form,deltaE_numeric");
    assert_eq!(lines.len(), 2 + 4 * 3 * 2);
    for line in &lines[2..] {
        for field in line.split(',') {
            let mantissa = field.split('e').next().unwrap();
            assert_eq!(
                mantissa.chars().filter(char::is_ascii_digit).count(),
                17,
                "{field}"
            );
            field.parse::<f64>().unwrap();
        }
    }
    let summary: Value =
        serde_json::from_slice(&std::fs::read(out.with_extension("summary.json")).unwrap())
            .unwrap();
    assert_eq!(summary["pass"], true);
}

#[test]
fn json_keys_are_sorted() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("flow.json");
    assert!(run(
        "flow",
        &configs_dir().join("flow_composite.json"),
        &out,
        None
    )
    .status
    .success());
    let text = std::fs::read_to_string(&out).unwrap();
    let value: Value = serde_json::from_str(&text).unwrap();
    fn check(v: &Value) {
        match v {
            Value::Object(map) => {
                let keys: Vec<&String> = map.keys().collect();
                let mut sorted = keys.clone();
                sorted.sort();
                assert_eq!(keys, sorted);
                map.values().for_each(check);
            }
            Value::Array(items) => items.iter().for_each(check),
            _ => {}
        }
    }
    check(&value);
    // key order in the file itself
    let reserialized = serde_json::to_string_pretty(&value).unwrap() + "\n";
    assert_eq!(text, reserialized);
}

#[test]
fn unknown_keys_are_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "bad.json",
        r#"{"operator":{"family":"shift","power":1},"half_width":8,"colour":"red"}"#,
    );
    let res = run("flow", &cfg, &dir.path().join("o.json"), None);
    assert_eq!(res.status.code(), Some(2));
    let err = stderr_json(&res);
    assert_eq!(err["error"], "config");
    assert!(err["message"].as_str().unwrap().contains("colour"));
}

#[test]
fn too_few_samples_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "h.json",
        r#"{"channel":{"type":"mup"},"dimension":4,"samples":99}"#,
    );
    let res = run("haar", &cfg, &dir.path().join("o.json"), None);
    assert_eq!(res.status.code(), Some(2));
    assert_eq!(stderr_json(&res)["error"], "config");
}

#[test]
fn non_unit_qubit_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "g.json",
        r#"{"unitary":{"a":[0.6,0.0],"b":[0.6,0.0],"phase":0.0},"grid":{"cos_theta":2,"phi":2,"radius":2}}"#,
    );
    let res = run("bloch-grid", &cfg, &dir.path().join("o.csv"), None);
    assert_eq!(res.status.code(), Some(2));
}

#[test]
fn invalid_ladder_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "p.json",
        r#"{"ladder":{"energies":[0.0,1.0,1.0]},"controls":[{"theta":0.0}]}"#,
    );
    let res = run("protocol-report", &cfg, &dir.path().join("o.json"), None);
    assert_eq!(res.status.code(), Some(2));
}

#[test]
fn band_window_mismatch_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "f.json",
        r#"{"operator":{"family":"shift","power":1},"half_width":3,"cuts":[3]}"#,
    );
    let res = run("flow", &cfg, &dir.path().join("o.json"), None);
    assert_eq!(res.status.code(), Some(2));
    assert_eq!(stderr_json(&res)["error"], "config");
}

#[test]
fn failed_verdicts_exit_nonzero_with_failure_list() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "f.json",
        r#"{"operator":{"family":"shift","power":1},"half_width":8,"expected_index":0}"#,
    );
    let out = dir.path().join("o.json");
    let res = run("flow", &cfg, &out, None);
    assert_eq!(res.status.code(), Some(1));
    let err = stderr_json(&res);
    assert_eq!(err["failures"], serde_json::json!(["shift^1_index"]));
    let report: Value = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    assert_eq!(report["pass"], false);
    assert_eq!(report["failures"], err["failures"]);
}

#[test]
fn locality_failure_is_reported() {
    // the hop amplitude pi at distance 1 exceeds pi e^{-1}
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "f.json",
        r#"{"operator":{"family":"composite_protocol"},"half_width":8,"locality":{"c":3.141592653589793,"l":1.0}}"#,
    );
    let res = run("flow", &cfg, &dir.path().join("o.json"), None);
    assert_eq!(res.status.code(), Some(1));
    assert_eq!(
        stderr_json(&res)["failures"],
        serde_json::json!(["composite_protocol_locality"])
    );
}

#[test]
fn protocol_report_contents() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    assert!(run(
        "protocol-report",
        &configs_dir().join("protocol_n4.json"),
        &out,
        None
    )
    .status
    .success());
    let r: Value = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    let controls = r["results"]["controls"].as_array().unwrap();
    assert_eq!(controls[0]["verdict"], "UC");
    assert_eq!(controls[3]["verdict"], "UD");
    let basis: Vec<f64> = controls[0]["basis_delta_e"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    for (got, want) in basis.iter().zip([1.0, 1.0, 1.0, 0.0]) {
        assert!((got - want).abs() < 1e-12);
    }
    assert!(r["results"]["equivalence_residual"].as_f64().unwrap() <= 1e-10);
    assert_eq!(
        r["results"]["catalysis"]["composite_flow_index"]["rounded"],
        0
    );
    let table = std::fs::read_to_string(out.with_extension("table.csv")).unwrap();
    assert_eq!(table.lines().nth(1), Some("control,theta,phi,probe,deltaE"));
    // 4 controls x (4 basis + mixed + 10 random) probes
    assert_eq!(table.lines().count(), 2 + 4 * 15);
}

#[test]
fn haar_report_flags_unprefixed_value() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("h.json");
    assert!(
        run("haar", &configs_dir().join("haar_mup_n4.json"), &out, None)
            .status
            .success()
    );
    let r: Value = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    assert_eq!(r["results"]["exact"], 0.75);
    assert_eq!(
        r["results"]["normalization_flag"]["unnormalized_value"],
        3.0
    );
    assert_eq!(r["results"]["normalization_flag"]["matches_exact"], false);
    assert_eq!(r["results"]["compatible"], true);
}

#[test]
fn missing_config_file_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let res = run(
        "haar",
        &dir.path().join("absent.json"),
        &dir.path().join("o.json"),
        None,
    );
    assert_eq!(res.status.code(), Some(2));
    assert_eq!(stderr_json(&res)["error"], "io");
}

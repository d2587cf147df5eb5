//! End-to-end runs of the experiment runner and the CLI.

use std::path::Path;
use std::process::Command;

use serde_json::{json, Map, Value};

use entcirc::harness::{run, ExperimentConfig};

fn config(exp: &str, out: &Path, extra: Value) -> ExperimentConfig {
    let mut map = Map::new();
    map.insert("experiment".into(), json!(exp));
    map.insert("out".into(), json!(out));
    if let Value::Object(e) = extra {
        map.extend(e);
    }
    ExperimentConfig::from_layers(None, map).unwrap()
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap()
}

#[test]
fn reruns_are_byte_identical_across_thread_counts() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let extra = json!({"samples": 12, "restarts": 4, "seed": 42});
    let mut ca = config("prop-check", a.path(), extra.clone());
    ca.threads = 1;
    let mut cb = config("prop-check", b.path(), extra);
    cb.threads = 3;
    run(&ca).unwrap();
    run(&cb).unwrap();
    for f in ["prop_check.csv", "prop-check_summary.json"] {
        assert_eq!(read(a.path(), f), read(b.path(), f), "{f}");
    }
    let mut cc = config("prop-check", b.path(), json!({"samples": 12, "restarts": 4, "seed": 43}));
    cc.threads = 1;
    run(&cc).unwrap();
    assert_ne!(read(a.path(), "prop_check.csv"), read(b.path(), "prop_check.csv"));
}

#[test]
fn table_outputs_carry_metadata() {
    let dir = tempfile::tempdir().unwrap();
    let s = run(&config("table1", dir.path(), json!({"samples": 4, "restarts": 2, "bins": 5}))).unwrap();
    assert_eq!(s.results["rows"].as_array().unwrap().len(), 5);
    let csv = read(dir.path(), "table1.csv");
    assert!(csv.starts_with("# schema: split [label], samples [1], mean [1]"));
    for key in ["# experiment: table1", "# seed: 1", "# version: ", "# config: {"] {
        assert!(csv.contains(key), "{key}");
    }
    let data: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(data.len(), 6);
    assert_eq!(read(dir.path(), "table1_hist_w_w.csv").lines().filter(|l| !l.starts_with('#')).count(), 6);
}

#[test]
fn small_runs_of_each_fast_experiment() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("ggm", json!({"state": "dicke:4:2"})),
        ("merge", json!({"pair": "ghz,w", "params": "0,0.7853981633974483,0.7853981633974483"})),
        ("optimize", json!({"restarts": 4})),
        ("scan", json!({"grid": 5})),
        ("chain", json!({"state": "ghz", "m": 3})),
        ("triangle", json!({"restarts": 2, "step": 2})),
        ("dynamics", json!({"t_max": 7.0, "dt": 0.1})),
        ("dicke", json!({"n_aux": 2, "t_max": 2.0, "dt": 0.5})),
        ("decompose", json!({})),
    ];
    for (exp, extra) in cases {
        let s = run(&config(exp, dir.path(), extra)).unwrap_or_else(|e| panic!("{exp}: {e}"));
        assert!(dir.path().join(format!("{exp}_summary.json")).exists());
        assert!(s.files.len() >= 2, "{exp}");
    }
    let merge: Value = serde_json::from_str(&read(dir.path(), "merge_summary.json")).unwrap();
    assert!((merge["results"]["ggm"].as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-12);
    let dicke: Value = serde_json::from_str(&read(dir.path(), "dicke_summary.json")).unwrap();
    assert!(dicke["results"]["min_fidelity"].as_f64().unwrap() > 1.0 - 1e-12);
}

#[test]
fn disorder_and_fit_from_file() {
    let dir = tempfile::tempdir().unwrap();
    run(&config("disorder", dir.path(), json!({"sigmas": "0.06,0.08,0.1,0.12", "sweep_dt": 0.2}))).unwrap();
    let s = run(&config("tc-fit", dir.path(), json!({"input": dir.path().join("disorder_tc.csv")}))).unwrap();
    assert!(s.results["fit"]["relative_residual"].as_f64().unwrap().is_finite());
    assert!(dir.path().join("disorder_sigma_0p1.csv").exists());
}

#[test]
fn bad_configs_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let mut map = Map::new();
    map.insert("experiment".into(), json!("ggm"));
    map.insert("grdi".into(), json!(3));
    assert!(ExperimentConfig::from_layers(None, map).is_err());
    assert!(run(&config("nope", dir.path(), json!({}))).is_err());
    assert!(run(&config("ggm", dir.path(), json!({"state": "qutrit"}))).is_err());
    assert!(run(&config("disorder", dir.path(), json!({"scheme": "simpson", "sigma_j": 0.1}))).is_err());
}

#[test]
fn cli_flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, json!({"state": "w", "seed": 5}).to_string()).unwrap();
    let status = Command::new(env!("CARGO_BIN_EXE_entcirc"))
        .args(["ggm", "--config"])
        .arg(&cfg)
        .args(["--state", "ghz", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
    let summary: Value = serde_json::from_str(&read(dir.path(), "ggm_summary.json")).unwrap();
    assert_eq!(summary["seed"], 5);
    assert_eq!(summary["config"]["state"], "ghz");
    assert!((summary["results"]["ggm"].as_f64().unwrap() - 0.5).abs() < 1e-12);

    let bad = Command::new(env!("CARGO_BIN_EXE_entcirc")).args(["ggm", "--state", "nope", "--out"]).arg(dir.path()).output().unwrap();
    assert!(!bad.status.success());
}

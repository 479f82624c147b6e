use std::path::Path;
use std::process::{Command, Output};

fn elastolab(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_elastolab"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn missing_config_exits_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let o = elastolab(&["simulate", "--config", "missing.json"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("config error"));
}

#[test]
fn density_past_the_limit_exits_with_2() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("c.json"), r#"{"density": {"delta": 0.6}}"#).unwrap();
    let o = elastolab(&["theorem2-proxy", "--config", "c.json"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bad_k_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = elastolab(&["simulate", "--k", "5"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn null_tensor_check_passes_and_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let o = elastolab(&["check-tensor", "--null", "--seed", "7", "--out", "t"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = stdout(&o);
    assert!(text.contains("PASS check-tensor") || text.contains("check-tensor PASS"));
    assert!(text.lines().any(|l| l.contains("transverse null deficit")));
    let t: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("t/tensor.json")).unwrap()).unwrap();
    assert_eq!(t["entries"].as_array().map(|a| a.len()), Some(729));
    let s: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("t/summary.json")).unwrap()).unwrap();
    assert_eq!(s["passed"], true);
    assert_eq!(s["seed"], 7);
}

#[test]
fn same_seed_gives_identical_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("c.json"),
        r#"{"kind": "simulate", "grid": {"points": 21}, "run": {"horizon": 1.0, "k": 1, "report_stride": 2}}"#,
    )
    .unwrap();
    for out in ["a", "b"] {
        let o = elastolab(&["run", "--config", "c.json", "--seed", "3", "--out", out], dir.path());
        assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    }
    for f in ["summary.json", "report.csv", "tensor.json", "final.ckpt", "config.json"] {
        let a = std::fs::read(dir.path().join("a").join(f)).unwrap();
        let b = std::fs::read(dir.path().join("b").join(f)).unwrap();
        assert_eq!(a, b, "{f}");
    }
}

#[test]
fn failing_criterion_exits_with_1() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("c.json"),
        r#"{"controls": {"broken_points": 17, "cfl_multiple": 0.5}}"#,
    )
    .unwrap();
    let o = elastolab(
        &["run", "--experiment", "control-broken-cfl", "--config", "c.json", "--out", "o"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL"));
}

#[test]
fn list_and_unknown_experiment() {
    let dir = tempfile::tempdir().unwrap();
    let o = elastolab(&["list"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    for name in ["check-tensor", "theorem2-proxy", "control-large-amplitude", "control-broken-cfl"] {
        assert!(stdout(&o).contains(name), "{name}");
    }
    let o = elastolab(&["run", "--experiment", "nope"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

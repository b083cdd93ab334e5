use std::fs;
use std::path::Path;
use std::process::Command;

fn lab() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lab"))
}

fn write_config(dir: &Path, text: &str) -> std::path::PathBuf {
    let p = dir.join("config.json");
    fs::write(&p, text).unwrap();
    p
}

#[test]
fn passing_run_exits_zero_and_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"experiment": "universal", "T": 5, "m": 3}"#);
    let out = dir.path().join("out");
    let st = lab().arg("run").arg(&cfg).arg("--out").arg(&out).status().unwrap();
    assert_eq!(st.code(), Some(0));
    for f in ["trace.csv", "summary.json", "chart.svg"] {
        assert!(out.join(f).exists(), "{f}");
    }
}

#[test]
fn violated_bound_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"experiment": "oblivious", "T": 4, "schedule": "constant"}"#);
    let out = dir.path().join("out");
    let o = lab().arg("run").arg(&cfg).arg("--out").arg(&out).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stdout).contains("VIOLATION"));
}

#[test]
fn bad_config_exits_four() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"experiment": "strongly-convex", "T": 4, "kappa": 1.0}"#);
    let st = lab().arg("run").arg(&cfg).arg("--out").arg(dir.path()).status().unwrap();
    assert_eq!(st.code(), Some(4));
    let st = lab().arg("run").arg(dir.path().join("missing.json")).status().unwrap();
    assert_eq!(st.code(), Some(4));
}

#[test]
fn usage_errors_exit_four_not_two() {
    let st = lab().arg("run").status().unwrap();
    assert_eq!(st.code(), Some(4));
    let st = lab().arg("--help").output().unwrap().status;
    assert_eq!(st.code(), Some(0));
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"experiment": "oblivious", "T": 6, "schedule": "random", "seed": 9}"#);
    let out = dir.path().join("out");
    let read = || {
        lab().arg("run").arg(&cfg).arg("--out").arg(&out).status().unwrap();
        (fs::read(out.join("trace.csv")).unwrap(), fs::read(out.join("summary.json")).unwrap())
    };
    assert_eq!(read(), read());
}

#[test]
fn timing_flag_records_runtime() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"experiment": "upper-agd", "T": 3, "kappa": 4}"#);
    let out = dir.path().join("out");
    lab().arg("run").arg(&cfg).arg("--out").arg(&out).arg("--timing").status().unwrap();
    let v: serde_json::Value = serde_json::from_slice(&fs::read(out.join("summary.json")).unwrap()).unwrap();
    assert!(v["runtime_ms"].as_f64().is_some());
}

#[test]
fn verify_appendix_reports_the_failing_property() {
    let o = lab().args(["verify-appendix", "--trials", "10", "--json"]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let failing: Vec<&str> = v["properties"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|p| p["failures"].as_u64() != Some(0))
        .map(|p| p["name"].as_str().unwrap())
        .collect();
    assert_eq!(failing, ["constant_schedule_e_ceiling"]);
}

use std::fs;

use paretolab::harness::*;
use paretolab::{
    make_strongly_convex_hard, run_chebyshev_iteration, run_oblivious_gd, LabError, StepSchedule,
};

fn cfg(kind: ExperimentKind, t: usize) -> ExperimentConfig {
    ExperimentConfig::new(kind, t)
}

#[test]
fn report_files_are_written_and_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = cfg(ExperimentKind::Universal, 6);
    c.m = 3;
    let rep = run_experiment(&c).unwrap();
    assert!(rep.passed(), "{:?}", rep.violations);
    let files = write_report(&rep, dir.path()).unwrap();
    let chart = files.chart.clone().expect("chart for T > 0");
    let trace1 = fs::read(&files.trace).unwrap();
    let summary1 = fs::read(&files.summary).unwrap();
    assert!(fs::read_to_string(chart).unwrap().starts_with("<svg"));

    let rep2 = run_experiment(&c).unwrap();
    let files2 = write_report(&rep2, dir.path()).unwrap();
    assert_eq!(trace1, fs::read(files2.trace).unwrap());
    assert_eq!(summary1, fs::read(files2.summary).unwrap());

    let header = String::from_utf8(trace1).unwrap();
    assert!(header.starts_with("t,f_gap,grad_norm,pareto_gap,floor,ceiling,method\n"));
    let summary: serde_json::Value = serde_json::from_slice(&summary1).unwrap();
    for key in ["experiment", "config", "metrics", "violations", "runtime_ms"] {
        assert!(summary.get(key).is_some(), "missing {key}");
    }
    assert!(summary["runtime_ms"].is_null());
}

#[test]
fn zero_horizon_writes_single_rows_and_no_chart() {
    let dir = tempfile::tempdir().unwrap();
    let g = make_strongly_convex_hard(4.0, 1.0, 3, 1.0).unwrap();
    let s = StepSchedule::constant(0.25, 0, 4.0).unwrap();
    let traces = vec![
        run_oblivious_gd(&g, &s, g.e0(), 0).unwrap(),
        run_chebyshev_iteration(&g, 1.0, 4.0, g.e0(), 0).unwrap(),
    ];
    let report = ExperimentReport {
        config: cfg(ExperimentKind::StronglyConvex, 1),
        traces,
        bounds: BoundCurve::default(),
        checks: Vec::new(),
        metrics: Default::default(),
        violations: Vec::new(),
        runtime_ms: None,
    };
    let files = write_report(&report, dir.path()).unwrap();
    assert!(files.chart.is_none());
    assert!(!dir.path().join("chart.svg").exists());
    let text = fs::read_to_string(files.trace).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r.starts_with("0,")));
}

#[test]
fn strongly_convex_floors_hold_and_known_ceiling_fails() {
    let mut c = cfg(ExperimentKind::StronglyConvex, 8);
    c.kappa = Some(9.0);
    let rep = run_experiment(&c).unwrap();
    assert_eq!(exit_code(&Ok(rep.clone())), EXIT_VIOLATION);
    assert!(rep.violations.iter().all(|v| v.method == "agd-sc"), "{:?}", rep.violations);
    assert!(rep
        .checks
        .iter()
        .filter(|c| matches!(c.kind, BoundKind::Floor))
        .all(|c| c.pass));
}

#[test]
fn convex_upper_agd_passes() {
    let mut c = cfg(ExperimentKind::UpperAgd, 19);
    c.epsilon = Some(0.1);
    let rep = run_experiment(&c).unwrap();
    assert!(rep.passed(), "{:?}", rep.violations);
    assert_eq!(exit_code(&Ok(rep)), EXIT_OK);
}

#[test]
fn random_oblivious_schedule_respects_the_floor() {
    let mut c = cfg(ExperimentKind::Oblivious, 12);
    c.schedule = Some(ScheduleSpec::Named("random".into()));
    c.seed = 3;
    let rep = run_experiment(&c).unwrap();
    assert!(rep
        .checks
        .iter()
        .filter(|c| matches!(c.kind, BoundKind::Floor))
        .all(|c| c.pass));
}

#[test]
fn invalid_configs_map_to_config_exit_code() {
    for text in [
        r#"{"experiment": "strongly-convex", "T": 4, "kappa": 1.0}"#,
        r#"{"experiment": "oblivious", "T": 4, "mu": 0.5}"#,
        r#"{"experiment": "oblivious", "T": 4, "bogus": 1}"#,
        r#"{"experiment": "universal", "T": 4, "epsilon": 0.1}"#,
        r#"{"experiment": "oblivious", "T": 3, "schedule": [0.5, 2.0, 0.1]}"#,
    ] {
        let outcome = ExperimentConfig::from_json(text).and_then(|c| run_experiment(&c));
        assert_eq!(exit_code(&outcome), EXIT_CONFIG, "{text}");
    }
    let e: Result<ExperimentReport, LabError> = Err(LabError::Convergence("x".into()));
    assert_eq!(exit_code(&e), EXIT_SOLVER);
}

#[test]
fn diagnostic_records_the_error() {
    let dir = tempfile::tempdir().unwrap();
    let c = cfg(ExperimentKind::Universal, 3);
    let p = write_diagnostic(dir.path(), &c, &LabError::Convergence("stalled".into())).unwrap();
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap();
    assert_eq!(v["solver_failure"], true);
    assert!(v["error"].as_str().unwrap().contains("stalled"));
}

#[test]
fn appendix_flags_only_the_e_ceiling() {
    let rep = verify_appendix(&AppendixConfig::with_trials(20)).unwrap();
    let failing: Vec<_> = rep.properties.iter().filter(|p| !p.passed()).map(|p| p.name.as_str()).collect();
    assert_eq!(failing, ["constant_schedule_e_ceiling"]);
}

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::bounds::{BoundCheck, BoundCurve, BoundKind, Quantity};
use super::config::ExperimentConfig;
use super::experiments::{ExperimentReport, Violation};
use crate::error::Result;
use crate::methods::IterateTrace;

pub const TRACE_FILE: &str = "trace.csv";
pub const SUMMARY_FILE: &str = "summary.json";
pub const CHART_FILE: &str = "chart.svg";
pub const DIAGNOSTIC_FILE: &str = "diagnostic.json";

#[derive(Serialize)]
struct TraceRow<'a> {
    t: usize,
    f_gap: f64,
    grad_norm: f64,
    pareto_gap: Option<f64>,
    floor: Option<f64>,
    ceiling: Option<f64>,
    method: &'a str,
}

/// Aggregate of all checks sharing a method, quantity, kind and formula.
#[derive(Debug, Serialize)]
pub struct CheckGroup {
    pub method: String,
    pub quantity: Quantity,
    pub kind: BoundKind,
    pub tag: String,
    pub count: usize,
    pub failed: usize,
    pub worst_margin: f64,
    pub pass: bool,
}

#[derive(Serialize)]
struct Summary<'a> {
    experiment: &'static str,
    config: &'a ExperimentConfig,
    metrics: &'a BTreeMap<String, f64>,
    checks: Vec<CheckGroup>,
    violations: &'a [Violation],
    runtime_ms: Option<f64>,
}

/// Files written by [`write_report`]; `chart` is `None` for single-iterate runs.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportFiles {
    pub trace: PathBuf,
    pub summary: PathBuf,
    pub chart: Option<PathBuf>,
}

pub fn group_checks(checks: &[BoundCheck]) -> Vec<CheckGroup> {
    let mut groups: BTreeMap<(String, Quantity, BoundKind, String), CheckGroup> = BTreeMap::new();
    for c in checks {
        let key = (c.method.clone(), c.quantity, c.kind, c.tag.clone());
        let g = groups.entry(key).or_insert_with(|| CheckGroup {
            method: c.method.clone(),
            quantity: c.quantity,
            kind: c.kind,
            tag: c.tag.clone(),
            count: 0,
            failed: 0,
            worst_margin: f64::INFINITY,
            pass: true,
        });
        g.count += 1;
        if !c.pass {
            g.failed += 1;
            g.pass = false;
        }
        g.worst_margin = g.worst_margin.min(c.margin);
    }
    groups.into_values().collect()
}

/// Write the per-iterate CSV for every trace, rows grouped by method.
pub fn write_trace_csv(path: &Path, traces: &[IterateTrace], bounds: &BoundCurve) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for tr in traces {
        for t in 0..tr.points.len() {
            w.serialize(TraceRow {
                t,
                f_gap: tr.f_gaps[t],
                grad_norm: tr.grad_norms[t],
                pareto_gap: tr.gaps.as_ref().map(|g| g[t]),
                floor: bounds.tightest(&tr.method_tag, t, BoundKind::Floor),
                ceiling: bounds.tightest(&tr.method_tag, t, BoundKind::Ceiling),
                method: &tr.method_tag,
            })?;
        }
    }
    w.flush()?;
    Ok(())
}

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

/// Log-scale chart of the gap (or gradient norm) per method with its bounds.
/// Returns `None` when no trace has more than one iterate.
pub fn render_chart(traces: &[IterateTrace], bounds: &BoundCurve, title: &str) -> Option<String> {
    let t_max = traces.iter().map(|t| t.steps()).max()?;
    if t_max == 0 {
        return None;
    }
    let mut series: Vec<(String, &'static str, bool, Vec<(usize, f64)>)> = Vec::new();
    for (k, tr) in traces.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let ys = tr.gaps.as_ref().unwrap_or(&tr.grad_norms);
        series.push((tr.method_tag.clone(), color, false, ys.iter().copied().enumerate().collect()));
        for (kind, label) in [(BoundKind::Floor, "floor"), (BoundKind::Ceiling, "ceiling")] {
            let pts: Vec<(usize, f64)> =
                (0..tr.points.len()).filter_map(|t| bounds.tightest(&tr.method_tag, t, kind).map(|v| (t, v))).collect();
            if !pts.is_empty() {
                series.push((format!("{} {label}", tr.method_tag), color, true, pts));
            }
        }
    }
    let positive = series.iter().flat_map(|s| s.3.iter().map(|p| p.1)).filter(|v| *v > 0.0 && v.is_finite());
    let (lo, hi) = positive.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        return None;
    }
    let (mut ylo, mut yhi) = (lo.log10().floor(), hi.log10().ceil());
    if yhi <= ylo {
        yhi = ylo + 1.0;
    }
    ylo = ylo.min(yhi - 1.0);

    let (w, h) = (720.0, 440.0);
    let (left, right, top, bottom) = (70.0, 170.0, 40.0, 50.0);
    let pw = w - left - right;
    let ph = h - top - bottom;
    let sx = |t: usize| left + pw * t as f64 / t_max as f64;
    let sy = |v: f64| top + ph * (yhi - v.log10()) / (yhi - ylo);

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#);
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{left}" y="24" font-family="sans-serif" font-size="14">{title}</text>"#);
    let _ = writeln!(
        s,
        r#"<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black" stroke-width="1"/>"#
    );
    let mut decade = ylo as i32;
    while decade as f64 <= yhi {
        let y = sy(10f64.powi(decade));
        let _ = writeln!(
            s,
            r##"<line x1="{left}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#dddddd" stroke-width="1"/>"##,
            left + pw
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="end">1e{decade}</text>"#,
            left - 6.0,
            y + 4.0
        );
        decade += 1;
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="middle">t (0..{t_max})</text>"#,
        left + pw / 2.0,
        h - 15.0
    );
    for (k, (label, color, dashed, pts)) in series.iter().enumerate() {
        let coords: Vec<String> = pts
            .iter()
            .filter(|p| p.1 > 0.0 && p.1.is_finite())
            .map(|&(t, v)| format!("{:.2},{:.2}", sx(t), sy(v)))
            .collect();
        if coords.is_empty() {
            continue;
        }
        let dash = if *dashed { r#" stroke-dasharray="6,4""# } else { "" };
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5"{dash} points="{}"/>"#,
            coords.join(" ")
        );
        let ly = top + 14.0 * (k as f64 + 1.0);
        let lx = left + pw + 12.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{color}" stroke-width="1.5"{dash}/>"#,
            ly - 4.0,
            lx + 24.0,
            ly - 4.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{ly:.2}" font-family="sans-serif" font-size="11">{label}</text>"#,
            lx + 30.0
        );
    }
    s.push_str("</svg>\n");
    Some(s)
}

/// Write `trace.csv`, `summary.json` and (for runs longer than one iterate)
/// `chart.svg` into `dir`.
pub fn write_report(report: &ExperimentReport, dir: &Path) -> Result<ReportFiles> {
    fs::create_dir_all(dir)?;
    let trace = dir.join(TRACE_FILE);
    write_trace_csv(&trace, &report.traces, &report.bounds)?;

    let summary = dir.join(SUMMARY_FILE);
    let doc = Summary {
        experiment: report.experiment().tag(),
        config: &report.config,
        metrics: &report.metrics,
        checks: group_checks(&report.checks),
        violations: &report.violations,
        runtime_ms: report.runtime_ms,
    };
    let mut text = serde_json::to_string_pretty(&doc)?;
    text.push('\n');
    fs::write(&summary, text)?;

    let chart = match render_chart(&report.traces, &report.bounds, report.experiment().tag()) {
        Some(svg) => {
            let p = dir.join(CHART_FILE);
            fs::write(&p, svg)?;
            Some(p)
        }
        None => {
            let stale = dir.join(CHART_FILE);
            if stale.exists() {
                fs::remove_file(stale)?;
            }
            None
        }
    };
    Ok(ReportFiles { trace, summary, chart })
}

/// Record a solver failure next to where the report would have gone.
pub fn write_diagnostic(dir: &Path, config: &ExperimentConfig, error: &crate::error::LabError) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(DIAGNOSTIC_FILE);
    let doc = serde_json::json!({
        "experiment": config.experiment.tag(),
        "config": config,
        "error": error.to_string(),
        "solver_failure": error.is_solver_failure(),
    });
    let mut text = serde_json::to_string_pretty(&doc)?;
    text.push('\n');
    fs::write(&path, text)?;
    Ok(path)
}

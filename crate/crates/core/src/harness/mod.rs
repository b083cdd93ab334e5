//! Experiment driver: configs, bound curves, reports and appendix checks.
//!
//! A run builds its instance, executes the methods, pairs every iterate with
//! the floors and ceilings that apply to it, and reports each comparison.
//! [`exit_code`] maps the outcome onto the process status used by the CLI.

pub mod appendix;
pub mod bounds;
pub mod config;
pub mod experiments;
pub mod report;

pub use appendix::{verify_appendix, AppendixConfig, AppendixReport, PropertyResult};
pub use bounds::{BoundCheck, BoundCurve, BoundEntry, BoundKind, Measurements, Quantity, BOUND_SLACK};
pub use config::{ExperimentConfig, ExperimentKind, Resolved, ScheduleSpec};
pub use experiments::{run_experiment, sufficient_iterations, ExperimentReport, Violation};
pub use report::{render_chart, write_diagnostic, write_report, write_trace_csv, ReportFiles};

use crate::error::LabError;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;
pub const EXIT_CONFIG: i32 = 4;

/// Process status for a finished run or the error that stopped it.
pub fn exit_code(outcome: &Result<ExperimentReport, LabError>) -> i32 {
    match outcome {
        Ok(rep) if rep.passed() => EXIT_OK,
        Ok(_) => EXIT_VIOLATION,
        Err(e) if e.is_solver_failure() => EXIT_SOLVER,
        Err(_) => EXIT_CONFIG,
    }
}

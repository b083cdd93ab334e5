use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use paretolab::harness::{
    exit_code, run_experiment, verify_appendix, write_diagnostic, write_report, AppendixConfig, ExperimentConfig,
    EXIT_CONFIG, EXIT_OK, EXIT_SOLVER, EXIT_VIOLATION,
};

/// Lower- and upper-bound experiments for Pareto stationarity.
#[derive(Parser)]
#[command(name = "lab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment from a JSON config and write its report.
    Run {
        config: PathBuf,
        /// Output directory; overrides `output_dir` in the config.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Stationarity tolerance for the gap solver.
        #[arg(long)]
        tol: Option<f64>,
        /// Record wall-clock time in the summary (makes it non-reproducible).
        #[arg(long)]
        timing: bool,
    },
    /// Check the extremal-polynomial inequalities on random samples.
    VerifyAppendix {
        /// Samples per randomized property; defaults to the full suite.
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
    },
}

fn status(code: i32) -> ExitCode {
    ExitCode::from(code as u8)
}

fn run(config: PathBuf, out: Option<PathBuf>, seed: Option<u64>, tol: Option<f64>, timing: bool) -> i32 {
    let mut cfg = match ExperimentConfig::load(&config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if let Some(t) = tol {
        cfg.tol = t;
    }
    if let Some(o) = out {
        cfg.output_dir = Some(o);
    }
    let dir = cfg
        .output_dir
        .clone()
        .unwrap_or_else(|| PathBuf::from("out").join(cfg.experiment.tag()));

    let start = Instant::now();
    let mut outcome = run_experiment(&cfg);
    let code = exit_code(&outcome);
    match &mut outcome {
        Ok(report) => {
            if timing {
                report.runtime_ms = Some(start.elapsed().as_secs_f64() * 1e3);
            }
            let files = match write_report(report, &dir) {
                Ok(f) => f,
                Err(e) => {
                    eprintln!("error: cannot write report to {}: {e}", dir.display());
                    return EXIT_CONFIG;
                }
            };
            println!("{}: {} checks, {} violations", cfg.experiment.tag(), report.checks.len(), report.violations.len());
            for (k, v) in &report.metrics {
                println!("  {k} = {v}");
            }
            for v in &report.violations {
                let at = v.t.map(|t| format!(" t={t}")).unwrap_or_default();
                println!("  VIOLATION {} {}{at} [{}]: measured {} vs bound {}", v.check, v.method, v.tag, v.measured, v.bound);
            }
            println!("wrote {}", files.summary.display());
        }
        Err(e) => {
            eprintln!("error: {e}");
            if code == EXIT_SOLVER {
                match write_diagnostic(&dir, &cfg, e) {
                    Ok(p) => eprintln!("diagnostic written to {}", p.display()),
                    Err(w) => eprintln!("could not write diagnostic: {w}"),
                }
            }
        }
    }
    code
}

fn appendix(trials: Option<usize>, seed: u64, json: bool) -> i32 {
    let mut cfg = trials.map(AppendixConfig::with_trials).unwrap_or_default();
    cfg.seed = seed;
    let report = match verify_appendix(&cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return if e.is_solver_failure() { EXIT_SOLVER } else { EXIT_CONFIG };
        }
    };
    if json {
        match serde_json::to_string_pretty(&report) {
            Ok(s) => println!("{s}"),
            Err(e) => {
                eprintln!("error: {e}");
                return EXIT_CONFIG;
            }
        }
    } else {
        for p in &report.properties {
            let mark = if p.passed() { "PASS" } else { "FAIL" };
            println!("{mark} {:<34} cases={:<7} failures={:<5} worst_margin={:.3e}", p.name, p.cases, p.failures, p.worst_margin);
        }
    }
    if report.passed() {
        EXIT_OK
    } else {
        EXIT_VIOLATION
    }
}

fn main() -> ExitCode {
    // clap exits with 2 on usage errors, which would read as a bound violation.
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return status(if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK });
        }
    };
    let code = match cli.command {
        Command::Run { config, out, seed, tol, timing } => run(config, out, seed, tol, timing),
        Command::VerifyAppendix { trials, seed, json } => appendix(trials, seed, json),
    };
    status(code)
}

//! `graded-riccati`: runs scenario files through the solvers and verifiers
//! and writes trajectories, grids and residual reports.
//!
//! Exit codes: 0 all gates pass, 1 a residual exceeds its gate, 2 invalid
//! configuration or I/O failure, 3 numeric failure (blow-up, loss of Gauss
//! decomposability, divergence).

mod catalog;
mod output;
mod run;
mod scenario;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use output::{Failure, GateResult, Report, Status};
use run::{failure_coordinates, RunError};
use scenario::{ConfigError, Overrides, Scenario};

#[derive(Parser)]
#[command(name = "graded-riccati", version, about = "Riccati-type equations on graded gl(n, C): batch scenario runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run scenario files; `builtin:<name>` selects a bundled scenario.
    Run {
        #[arg(required = true)]
        configs: Vec<String>,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        /// Integration steps (interval problems) or substeps per grid cell.
        #[arg(long)]
        steps: Option<usize>,
        /// Nodes on every grid axis.
        #[arg(long)]
        grid: Option<usize>,
        /// Residual gate replacing the scenario's default.
        #[arg(long)]
        gate: Option<f64>,
    },
    /// List the bundled scenarios.
    ListExamples {
        /// Print one scenario file.
        #[arg(long)]
        show: Option<String>,
        /// Write all scenario files into a directory.
        #[arg(long)]
        write: Option<PathBuf>,
    },
}

fn load(source: &str) -> Result<String, ConfigError> {
    match source.strip_prefix("builtin:") {
        Some(name) => catalog::find(name)
            .map(|e| e.text.to_string())
            .ok_or_else(|| ConfigError(format!("no bundled scenario named {name:?}"))),
        None => fs::read_to_string(source).map_err(|e| ConfigError(format!("{source}: {e}"))),
    }
}

fn config_failure(name: String, kind: &str, e: ConfigError) -> Report {
    Report {
        name,
        kind: kind.into(),
        status: Status::ConfigError,
        exit_code: Status::ConfigError.exit_code(),
        residuals: Default::default(),
        failing: vec![],
        metadata: Default::default(),
        warnings: vec![],
        failure: Some(Failure {
            error: e.0,
            coordinates: vec![],
        }),
        outputs: vec![],
    }
}

/// Runs one scenario and writes its files. The report is `None` when the
/// file could not be parsed far enough to name it.
fn run_one(source: &str, out_dir: &Path, overrides: &Overrides) -> (Option<Report>, Status, String) {
    let parsed = load(source).and_then(|text| {
        let mut s = Scenario::parse(&text)?;
        s.apply(overrides)?;
        Ok(s)
    });
    let scenario = match parsed {
        Ok(s) => s,
        Err(e) => return (None, Status::ConfigError, format!("{source}: {e}")),
    };
    let mut report = match run::execute(&scenario.problem) {
        Ok(outcome) => {
            let mut residuals = std::collections::BTreeMap::new();
            let mut failing = vec![];
            for (key, &value) in &outcome.report.residuals {
                let gate = scenario.gate_for(key);
                let pass = value <= gate;
                if !pass {
                    failing.push(key.clone());
                }
                residuals.insert(key.clone(), GateResult { value, gate, pass });
            }
            let status = if failing.is_empty() { Status::Pass } else { Status::GateFailure };
            let outputs = match output::write_datasets(out_dir, &scenario.name, &outcome.datasets) {
                Ok(files) => files,
                Err(e) => {
                    let msg = format!("writing outputs: {e}");
                    return (None, Status::ConfigError, format!("{}: {msg}", scenario.name));
                }
            };
            Report {
                name: scenario.name.clone(),
                kind: scenario.problem.kind().into(),
                status,
                exit_code: status.exit_code(),
                residuals,
                failing,
                metadata: {
                    let mut m = outcome.report.metadata;
                    if let Some(d) = &scenario.description {
                        m.insert("description".into(), d.clone());
                    }
                    m
                },
                warnings: outcome.report.warnings,
                failure: None,
                outputs,
            }
        }
        Err(RunError::Config(e)) => config_failure(scenario.name.clone(), scenario.problem.kind(), e),
        Err(RunError::Numeric(e)) => Report {
            name: scenario.name.clone(),
            kind: scenario.problem.kind().into(),
            status: Status::NumericFailure,
            exit_code: Status::NumericFailure.exit_code(),
            residuals: Default::default(),
            failing: vec![],
            metadata: Default::default(),
            warnings: vec![],
            failure: Some(Failure {
                error: e.to_string(),
                coordinates: failure_coordinates(&e),
            }),
            outputs: vec![],
        },
    };
    let file = format!("{}-report.json", scenario.name);
    report.outputs.push(file);
    let status = report.status;
    let line = match output::write_report(out_dir, &report) {
        Ok(path) => summary(&report, &path),
        Err(e) => return (Some(report), Status::ConfigError, format!("{}: writing report: {e}", scenario.name)),
    };
    (Some(report), status, line)
}

fn summary(report: &Report, path: &Path) -> String {
    let detail = match (&report.failure, report.failing.is_empty()) {
        (Some(f), _) => f.error.clone(),
        (None, false) => format!("gate exceeded by {}", report.failing.join(", ")),
        (None, true) => {
            let worst = report.residuals.values().map(|g| g.value).fold(0.0, f64::max);
            format!("max residual {worst:.3e}")
        }
    };
    format!("{}: {:?} ({detail}) -> {}", report.name, report.status, path.display())
}

fn run_all(configs: &[String], out_dir: &Path, overrides: Overrides) -> ExitCode {
    if let Err(e) = fs::create_dir_all(out_dir) {
        eprintln!("{}: {e}", out_dir.display());
        return ExitCode::from(2);
    }
    let results: Vec<(Option<Report>, Status, String)> = std::thread::scope(|s| {
        let handles: Vec<_> = configs.iter().map(|c| s.spawn(move || run_one(c, out_dir, &overrides))).collect();
        handles.into_iter().map(|h| h.join().expect("scenario thread panicked")).collect()
    });
    let mut code = 0;
    for (_, status, line) in &results {
        if *status == Status::Pass {
            println!("{line}");
        } else {
            eprintln!("{line}");
        }
        code = code.max(status.exit_code());
    }
    ExitCode::from(code as u8)
}

fn list(show: Option<String>, write: Option<PathBuf>) -> ExitCode {
    if let Some(name) = show {
        return match catalog::find(&name) {
            Some(e) => {
                print!("{}", e.text);
                ExitCode::SUCCESS
            }
            None => {
                eprintln!("no bundled scenario named {name:?}");
                ExitCode::from(2)
            }
        };
    }
    if let Some(dir) = write {
        let written = fs::create_dir_all(&dir).and_then(|_| {
            catalog::EXAMPLES
                .iter()
                .try_for_each(|e| fs::write(dir.join(format!("{}.json", e.name)), e.text))
        });
        if let Err(e) = written {
            eprintln!("{}: {e}", dir.display());
            return ExitCode::from(2);
        }
    }
    for e in catalog::EXAMPLES {
        println!("{:<24} {}", e.name, e.topic);
    }
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run { configs, out_dir, steps, grid, gate } => run_all(&configs, &out_dir, Overrides { steps, grid, gate }),
        Command::ListExamples { show, write } => list(show, write),
    }
}

//! Batch runner for `prodint-core` experiments.
//!
//! A run reads a JSON [`ExperimentConfig`], executes the checks of one
//! experiment kind and writes `checks.csv`, `summary.json` and, for
//! convergence studies, `convergence_<scheme>.csv`.

pub mod config;
pub mod descriptor;
pub mod error;
pub mod experiments;
pub mod report;

use std::path::{Path, PathBuf};
use std::time::Instant;

pub use config::{ExperimentConfig, ExperimentKind};
pub use error::CliError;
pub use report::{CheckRow, RunReport};

/// Environment variable capping the worker threads.
pub const THREADS_VAR: &str = "PRODINT_THREADS";
pub const DEFAULT_OUT_DIR: &str = "prodint-out";

/// Sizes the global thread pool from `PRODINT_THREADS` once per process.
pub fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Schema(format!("{THREADS_VAR} must be a positive integer, found `{value}`")))?;
    // a second initialization (tests, embedding) keeps the first pool
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

/// Runs the experiment without writing any file.
pub fn evaluate(cfg: &ExperimentConfig) -> Result<RunReport, CliError> {
    let ctx = experiments::Context::new(cfg)?;
    experiments::run(&ctx)
}

#[derive(Debug)]
pub struct RunOutcome {
    pub report: RunReport,
    pub dir: PathBuf,
    pub files: Vec<String>,
}

impl RunOutcome {
    pub fn exit_code(&self) -> u8 {
        if self.report.all_passed() {
            0
        } else {
            1
        }
    }
}

/// Runs the experiment and writes the reports into `out`, the configured
/// directory, or [`DEFAULT_OUT_DIR`].
pub fn run(cfg: &ExperimentConfig, out: Option<&Path>) -> Result<RunOutcome, CliError> {
    let start = Instant::now();
    let report = evaluate(cfg)?;
    let dir = out
        .map(Path::to_path_buf)
        .or_else(|| cfg.output.dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR));
    let files = report.write(&dir, cfg, start.elapsed().as_secs_f64())?;
    Ok(RunOutcome { report, dir, files })
}

/// One line per experiment kind: name, core module, description, identity.
pub fn list_experiments() -> String {
    let width = ExperimentKind::ALL.iter().map(|k| k.name().len()).max().unwrap_or(0);
    let mut out = String::new();
    for k in ExperimentKind::ALL {
        out.push_str(&format!(
            "{:width$}  [{}] {}; checks: {}\n",
            k.name(),
            k.module(),
            k.description(),
            k.anchor(),
        ));
    }
    out
}

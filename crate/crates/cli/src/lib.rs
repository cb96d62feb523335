//! Configuration-driven verification experiments.
//!
//! Each experiment produces an [`report::ExperimentReport`] written to
//! `<out>/<experiment>/summary.json` plus CSV tables.

pub mod config;
pub mod experiments;
pub mod fixtures;
pub mod reference;
pub mod report;

use std::path::Path;

use rayon::prelude::*;

use config::ExperimentConfig;
use experiments::{run_experiment, Experiment};
use report::ExperimentReport;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] config::ConfigError),
    #[error("{experiment}: {source}")]
    Experiment { experiment: &'static str, source: scaledgauge_core::Error },
    #[error("writing reports: {0}")]
    Io(#[from] std::io::Error),
    #[error("thread pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => EXIT_CONFIG,
            _ => EXIT_INTERNAL,
        }
    }
}

/// Runs the experiments in order, `workers` at a time. Reports come back in
/// the order of `experiments` regardless of completion order.
pub fn run(
    experiments: &[Experiment],
    cfg: &ExperimentConfig,
    seed: u64,
    workers: usize,
) -> Result<Vec<ExperimentReport>, RunError> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers.max(1)).build()?;
    let results: Vec<_> = pool.install(|| {
        experiments
            .par_iter()
            .map(|&e| run_experiment(e, cfg, seed).map_err(|source| RunError::Experiment { experiment: e.name(), source }))
            .collect()
    });
    results.into_iter().collect()
}

/// Writes every report, plus an aggregate `all/summary.json` when more than
/// one experiment ran.
pub fn write_reports(reports: &[ExperimentReport], out: &Path) -> std::io::Result<()> {
    for r in reports {
        r.write(out)?;
    }
    if reports.len() > 1 {
        let dir = out.join("all");
        std::fs::create_dir_all(&dir)?;
        let summary = serde_json::json!({
            "experiment": "all",
            "pass": reports.iter().all(|r| r.passed()),
            "experiments": reports.iter().map(|r| serde_json::json!({
                "experiment": r.experiment,
                "pass": r.passed(),
                "checks": r.checks.len(),
            })).collect::<Vec<_>>(),
            "duration_seconds": reports.iter().map(|r| r.duration.as_secs_f64()).sum::<f64>(),
        });
        std::fs::write(dir.join("summary.json"), serde_json::to_string_pretty(&summary)? + "\n")?;
    }
    Ok(())
}

//! Experiment harness for `chenlee-core`: strict TOML configuration, the
//! eight experiments, CSV/JSON artifacts and binary state snapshots.
//!
//! ```no_run
//! use chenlee_lab::{config::{Experiment, RunConfig}, run_experiment, RunOptions};
//!
//! let cfg = RunConfig::new(Experiment::IllposedC3).quick();
//! let summary = run_experiment(&cfg, &RunOptions { jobs: 0, quick: true, out_dir: "out".into() }).unwrap();
//! println!("{}", if summary.outcome.passed() { "PASS" } else { "FAIL" });
//! ```

pub mod config;
pub mod error;
pub mod experiments;
pub mod output;
pub mod snapshot;

use std::path::PathBuf;
use std::time::Instant;

pub use config::{parse_config, RunConfig};
pub use error::{LabError, Result};
pub use experiments::Outcome;

#[derive(Debug, Clone)]
pub struct RunOptions {
    /// Worker threads for sweep members; `0` picks the rayon default.
    pub jobs: usize,
    /// Recorded in the manifest; the config is expected to be scaled down already.
    pub quick: bool,
    /// Artifacts go to `out_dir/<experiment>/`.
    pub out_dir: PathBuf,
}

#[derive(Debug)]
pub struct RunSummary {
    pub outcome: Outcome,
    pub dir: PathBuf,
    pub files: Vec<PathBuf>,
}

/// Runs one experiment and writes its artifacts. On failure an
/// `error.json` record is written instead and the error returned.
pub fn run_experiment(cfg: &RunConfig, opts: &RunOptions) -> Result<RunSummary> {
    let dir = opts.out_dir.join(cfg.experiment.name());
    let start = Instant::now();
    let outcome = match experiments::run(cfg, opts.jobs) {
        Ok(o) => o,
        Err(e) => {
            // the original error matters more than a failure to record it
            let _ = output::write_error(&dir, &e.record());
            return Err(e);
        }
    };
    let info = output::RunInfo {
        quick: opts.quick,
        jobs: opts.jobs,
        wall_time_seconds: start.elapsed().as_secs_f64(),
    };
    let files = output::write_outcome(&dir, cfg, &outcome, info)?;
    Ok(RunSummary { outcome, dir, files })
}

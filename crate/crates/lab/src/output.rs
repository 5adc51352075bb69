//! Artifacts of a run. Floats are written with Rust's shortest round-trip
//! formatting, so identical numbers give identical bytes.

use std::fs;
use std::path::{Path, PathBuf};

use chenlee_core::ExperimentReport;
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{ErrorRecord, LabError, Result};
use crate::experiments::Outcome;
use crate::snapshot;

pub const SNAPSHOT_FILE: &str = "final_state.snap";

fn num(x: f64) -> String {
    format!("{x:?}")
}

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    let file = fs::File::create(path).map_err(|e| LabError::io(path, e))?;
    Ok(csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(file))
}

pub fn write_table(path: &Path, report: &ExperimentReport) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(&report.columns)?;
    for row in &report.rows {
        w.write_record(row.iter().map(|x| num(*x)))?;
    }
    w.flush().map_err(|e| LabError::io(path, e))?;
    Ok(())
}

fn write_checks(path: &Path, outcome: &Outcome) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["table", "check", "measured", "lower", "upper", "passed"])?;
    for (table, c) in outcome.checks() {
        let verdict = if c.passed() { "true" } else { "false" };
        w.write_record([table, &c.name, &num(c.measured), &num(c.lower), &num(c.upper), verdict])?;
    }
    w.flush().map_err(|e| LabError::io(path, e))?;
    Ok(())
}

fn write_metrics(path: &Path, outcome: &Outcome) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["table", "metric", "value"])?;
    for t in &outcome.tables {
        for (name, v) in &t.metrics {
            w.write_record([t.name.as_str(), name, &num(*v)])?;
        }
    }
    w.flush().map_err(|e| LabError::io(path, e))?;
    Ok(())
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    experiment: &'a str,
    passed: bool,
    quick: bool,
    jobs: usize,
    wall_time_seconds: f64,
    files: &'a [String],
    config: &'a RunConfig,
}

/// What the caller knows about the run besides its outcome.
#[derive(Debug, Clone, Copy)]
pub struct RunInfo {
    pub quick: bool,
    pub jobs: usize,
    pub wall_time_seconds: f64,
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(|e| LabError::io(path, e))
}

/// Writes every table, `checks.csv`, `metrics.csv`, the optional snapshot
/// and `manifest.json` into `dir`. Returns the files written, manifest last.
pub fn write_outcome(dir: &Path, cfg: &RunConfig, outcome: &Outcome, info: RunInfo) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| LabError::io(dir, e))?;
    // a record left by an earlier failed run
    let _ = fs::remove_file(dir.join("error.json"));
    let mut files = Vec::new();
    for t in &outcome.tables {
        let name = format!("{}.csv", t.name);
        write_table(&dir.join(&name), t)?;
        files.push(name);
    }
    write_checks(&dir.join("checks.csv"), outcome)?;
    write_metrics(&dir.join("metrics.csv"), outcome)?;
    files.push("checks.csv".into());
    files.push("metrics.csv".into());
    if let Some((u, t)) = &outcome.snapshot {
        snapshot::write(&dir.join(SNAPSHOT_FILE), u, *t)?;
        files.push(SNAPSHOT_FILE.into());
    }
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        experiment: outcome.experiment.name(),
        passed: outcome.passed(),
        quick: info.quick,
        jobs: info.jobs,
        wall_time_seconds: info.wall_time_seconds,
        files: &files,
        config: cfg,
    };
    write_json(&dir.join("manifest.json"), &manifest)?;
    files.push("manifest.json".into());
    Ok(files.into_iter().map(|f| dir.join(f)).collect())
}

pub fn write_error(dir: &Path, record: &ErrorRecord) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| LabError::io(dir, e))?;
    let path = dir.join("error.json");
    write_json(&path, record)?;
    Ok(path)
}

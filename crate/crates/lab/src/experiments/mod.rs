//! One module per experiment. Each turns a validated [`RunConfig`] into an
//! [`Outcome`]: named tables whose checks decide PASS/FAIL.

mod contraction;
mod decay;
mod illposed;
mod limits;
mod smoothing;
mod solve;

use chenlee_core::fields::{gaussian, normalized, random_smooth};
use chenlee_core::report::Check;
use chenlee_core::solver::Trajectory;
use chenlee_core::spectral::derivative;
use chenlee_core::{Error, ExperimentReport, Grid, SpectralField};
use rayon::prelude::*;

use crate::config::{DataKind, Experiment, RunConfig};
use crate::error::{LabError, Result};

#[derive(Debug, Clone)]
pub struct Outcome {
    pub experiment: Experiment,
    /// Written as `<name>.csv`; names are unique within an outcome.
    pub tables: Vec<ExperimentReport>,
    /// Final state of a `solve` run.
    pub snapshot: Option<(SpectralField, f64)>,
}

impl Outcome {
    fn new(experiment: Experiment, tables: Vec<ExperimentReport>) -> Self {
        Outcome { experiment, tables, snapshot: None }
    }

    pub fn checks(&self) -> impl Iterator<Item = (&str, &Check)> {
        self.tables.iter().flat_map(|t| t.checks.iter().map(move |c| (t.name.as_str(), c)))
    }

    pub fn passed(&self) -> bool {
        self.checks().all(|(_, c)| c.passed())
    }

    pub fn table(&self, name: &str) -> Option<&ExperimentReport> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn check(&self, table: &str, name: &str) -> Option<&Check> {
        self.table(table)?.check(name)
    }
}

/// Runs the selected experiment with sweep members spread over `jobs`
/// worker threads (`0` lets rayon decide).
pub fn run(cfg: &RunConfig, jobs: usize) -> Result<Outcome> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| LabError::invalid("jobs", e.to_string()))?;
    pool.install(|| match cfg.experiment {
        Experiment::Solve => solve::run(cfg),
        Experiment::Smoothing => smoothing::run(cfg),
        Experiment::Contraction => contraction::run(cfg),
        Experiment::IllposedC3 => illposed::run_c3(cfg),
        Experiment::IllposedC2nd => illposed::run_c2nd(cfg),
        Experiment::BetaLimit => limits::run_beta(cfg),
        Experiment::EtaLimit => limits::run_eta(cfg),
        Experiment::Decay => decay::run(cfg),
    })
}

/// Evaluates every member in parallel and returns them in input order. The
/// first failure, in input order, aborts with the count of members before it.
pub(crate) fn sweep<T, R, F>(items: &[T], f: F) -> chenlee_core::Result<Vec<R>>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> chenlee_core::Result<R> + Sync + Send,
{
    let results: Vec<chenlee_core::Result<R>> = items.par_iter().map(f).collect();
    let mut out = Vec::with_capacity(results.len());
    for r in results {
        match r {
            Ok(v) => out.push(v),
            Err(e) => return Err(Error::SweepAborted { completed: out.len(), cause: Box::new(e) }),
        }
    }
    Ok(out)
}

pub(crate) fn initial_data(grid: &Grid, kind: DataKind, amplitude: f64, width: f64, seed: u64) -> SpectralField {
    match kind {
        DataKind::Gaussian => gaussian(grid, amplitude, width),
        DataKind::GaussianDerivative => derivative(&gaussian(grid, amplitude, width), 1),
        DataKind::RandomSmooth => normalized(&random_smooth(grid, seed, width), 0.0, amplitude),
    }
}

/// `max_t |û(t,0) - û(0,0)|`.
pub(crate) fn mass_drift(tr: &Trajectory) -> f64 {
    let m0 = tr.initial_state().mean_mode();
    tr.states().iter().map(|u| (u.mean_mode() - m0).norm()).fold(0.0, f64::max)
}

use chenlee_core::flow::{c2_nd_entry, c2_nd_report, c3_entry, c3_report, GrowthOptions};
use chenlee_core::report::Check;
use chenlee_core::{EquationParams, ExperimentReport};

use super::{sweep, Outcome};
use crate::config::{IllposedBlock, RunConfig};
use crate::error::Result;

fn options(b: &IllposedBlock, seed: u64) -> GrowthOptions {
    GrowthOptions {
        points_per_band: b.points_per_band,
        slope_tolerance: b.slope_tolerance,
        kernel_samples: b.kernel_samples,
        seed,
    }
}

fn c3_sweep(b: &IllposedBlock, s: f64, opts: &GrowthOptions) -> Result<ExperimentReport> {
    let params = EquationParams::new(b.beta, b.eta, true)?;
    let entries = sweep(&b.n_list, |&n| c3_entry(s, b.epsilon, n, &params, opts))?;
    Ok(c3_report(s, b.epsilon, &entries, opts)?)
}

pub(super) fn run_c3(cfg: &RunConfig) -> Result<Outcome> {
    let b = cfg.illposed_c3.sweep();
    let opts = options(&b, cfg.seed);
    let mut main = c3_sweep(&b, b.s, &opts)?;
    main.name = "growth".into();
    let mut tables = vec![main];
    if let Some(s) = b.companion_s {
        // only the sign of the companion slope is asserted
        let mut comp = c3_sweep(&b, s, &opts)?;
        comp.name = "companion".into();
        let slope = comp.check("slope").map_or(f64::NAN, |c| c.measured);
        comp.checks.clear();
        comp.push_metric("s", s);
        comp.push_check(Check::at_most("companion_slope", slope, 0.0));
        tables.push(comp);
    }
    Ok(Outcome::new(cfg.experiment, tables))
}

pub(super) fn run_c2nd(cfg: &RunConfig) -> Result<Outcome> {
    let b = cfg.illposed_c2nd.sweep();
    let opts = options(&b, cfg.seed);
    let entries = sweep(&b.n_list, |&n| c2_nd_entry(b.s, b.epsilon, n, b.eta, &opts))?;
    let mut report = c2_nd_report(b.s, b.epsilon, &entries, b.eta, &opts)?;
    report.name = "growth".into();
    Ok(Outcome::new(cfg.experiment, vec![report]))
}

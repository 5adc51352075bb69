use chenlee_core::fields::{gaussian, normalized};
use chenlee_core::limits::{
    beta_report, blowup_time, calibrate_kato_constant, eta_report, sweep_member, LimitKind, LimitSweepConfig,
};
use chenlee_core::report::Check;
use chenlee_core::solver::Trajectory;
use chenlee_core::ExperimentReport;

use super::{mass_drift, sweep, Outcome};
use crate::config::RunConfig;
use crate::error::Result;

fn solve_members(cfg: &LimitSweepConfig, kind: LimitKind) -> Result<Vec<(f64, Trajectory)>> {
    cfg.validate(kind)?;
    let values = cfg.run_values(kind);
    let runs = sweep(&values, |v| sweep_member(cfg, kind, *v))?;
    Ok(values.into_iter().zip(runs).collect())
}

fn push_mass_check(report: &mut ExperimentReport, runs: &[(f64, Trajectory)], tolerance: f64) {
    let drift = runs.iter().map(|(_, tr)| mass_drift(tr)).fold(0.0, f64::max);
    report.push_check(Check::at_most("mass_drift", drift, tolerance));
}

pub(super) fn run_beta(cfg: &RunConfig) -> Result<Outcome> {
    let b = &cfg.beta_limit;
    let grid = cfg.grid.build("grid.modes")?;
    let sweep_cfg = LimitSweepConfig {
        base_params: cfg.equation.params(),
        sweep_values: b.values.clone(),
        s: b.s,
        phi: gaussian(&grid, b.amplitude, b.width),
        solver: cfg.solver.solver(),
        slope_tolerance: b.slope_tolerance,
        monotone_slack: b.monotone_slack,
        // not used by the β sweep
        kato_constant: 1.0,
    };
    let runs = solve_members(&sweep_cfg, LimitKind::Beta)?;
    let mut report = beta_report(&sweep_cfg, &runs)?;
    report.name = "beta-limit".into();
    push_mass_check(&mut report, &runs, b.mass_tolerance);
    Ok(Outcome::new(cfg.experiment, vec![report]))
}

pub(super) fn run_eta(cfg: &RunConfig) -> Result<Outcome> {
    let b = &cfg.eta_limit;
    let grid = cfg.grid.build("grid.modes")?;
    let c_s = calibrate_kato_constant(&grid, b.s, b.calibration_samples, cfg.seed)?;
    let blowup = blowup_time(b.norm, c_s);
    let mut solver = cfg.solver.solver();
    solver.t_final = b.t_cap.min(0.5 * blowup);
    solver.dt = solver.dt.min(solver.t_final);
    let sweep_cfg = LimitSweepConfig {
        base_params: cfg.equation.params(),
        sweep_values: b.values.clone(),
        s: b.s,
        phi: normalized(&gaussian(&grid, 1.0, b.width), b.s, b.norm),
        solver,
        slope_tolerance: b.slope_tolerance,
        monotone_slack: 0.0,
        kato_constant: c_s,
    };
    let runs = solve_members(&sweep_cfg, LimitKind::Eta)?;
    let mut report = eta_report(&sweep_cfg, &runs)?;
    report.name = "eta-limit".into();
    report.push_metric("kato_constant", c_s);
    report.push_metric("blowup_time", blowup);
    push_mass_check(&mut report, &runs, b.mass_tolerance);
    Ok(Outcome::new(cfg.experiment, vec![report]))
}

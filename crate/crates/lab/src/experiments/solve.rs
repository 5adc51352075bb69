use chenlee_core::norms::sobolev_norm;
use chenlee_core::report::Check;
use chenlee_core::solver::solve;
use chenlee_core::spectral::semigroup_apply;
use chenlee_core::ExperimentReport;

use super::{initial_data, mass_drift, Outcome};
use crate::config::RunConfig;
use crate::error::Result;

pub(super) fn run(cfg: &RunConfig) -> Result<Outcome> {
    let b = &cfg.solve;
    let grid = cfg.grid.build("grid.modes")?;
    let params = cfg.equation.params();
    let phi = initial_data(&grid, b.data, b.amplitude, b.width, cfg.seed);
    let tr = solve(&phi, &params, &cfg.solver.solver())?;

    let mut columns = vec!["t".to_string(), "re_mass".into(), "im_mass".into(), "l2".into(), "hs".into(), "max_abs".into()];
    columns.extend(b.modes.iter().map(|k| format!("abs_mode_{k}")));
    let columns: Vec<&str> = columns.iter().map(String::as_str).collect();
    let mut report = ExperimentReport::new("trajectory", &columns);
    for (t, u) in tr.times().iter().zip(tr.states()) {
        let m = u.mean_mode();
        let mut row = vec![*t, m.re, m.im, u.l2_norm(), sobolev_norm(u, b.s), u.max_abs()];
        row.extend(b.modes.iter().map(|k| u.mode(*k).map_or(0.0, |c| c.norm())));
        report.push_row(row);
    }

    let drift = mass_drift(&tr);
    report.push_metric("mass_drift", drift);
    report.push_check(Check::at_most("mass_drift", drift, b.mass_tolerance));
    if !params.nonlinear {
        let mut worst: f64 = 0.0;
        for (t, u) in tr.times().iter().zip(tr.states()) {
            let exact = semigroup_apply(&phi, *t, &params)?;
            let scale = exact.l2_norm();
            if scale > 0.0 {
                worst = worst.max(u.sub(&exact)?.l2_norm() / scale);
            }
        }
        report.push_check(Check::at_most("linear_defect", worst, b.linear_tolerance));
    }
    report.push_metric("samples", tr.len() as f64);

    let mut out = Outcome::new(cfg.experiment, vec![report]);
    if b.snapshot {
        out.snapshot = Some((tr.final_state().clone(), tr.end()));
    }
    Ok(out)
}

use chenlee_core::fields::gaussian;
use chenlee_core::norms::sobolev_norm;
use chenlee_core::report::Check;
use chenlee_core::solver::{contraction_time, solve_picard, Method, SolverConfig, Stepper, AMPLITUDE_CAP};
use chenlee_core::{ExperimentReport, SpectralField};

use super::{mass_drift, sweep, Outcome};
use crate::config::RunConfig;
use crate::error::Result;

struct Member {
    norm: f64,
    horizon: f64,
    iterations: usize,
    max_ratio: f64,
    residual: f64,
    distance: f64,
    drift: f64,
}

pub(super) fn run(cfg: &RunConfig) -> Result<Outcome> {
    let b = &cfg.contraction;
    let grid = cfg.grid.build("grid.modes")?;
    let params = cfg.equation.params();
    let max_dt = cfg.solver.dt;
    let members = sweep(&b.amplitudes, |&amp| {
        let phi = gaussian(&grid, amp, b.width);
        let norm = sobolev_norm(&phi, b.s);
        let horizon = contraction_time(norm, b.s, params.eta, b.constant)?;
        let solver = SolverConfig {
            method: Method::Picard,
            dt: horizon / (b.substeps * (b.nodes - 1)) as f64,
            t_final: horizon,
            save_every: 1,
            picard_max_iters: b.max_iterations,
            picard_tol: b.tolerance,
            picard_nodes: b.nodes,
            norm_s: b.s,
            ..SolverConfig::default()
        };
        let sol = solve_picard(&phi, &params, &solver)?;
        let nodes = sol.trajectory.times();
        // stepper from node to node: at least `substeps` steps per interval,
        // none longer than `solver.dt`
        let mut u: SpectralField = phi.clone();
        let mut distance: f64 = 0.0;
        let mut drift: f64 = 0.0;
        for i in 1..nodes.len() {
            let gap = nodes[i] - nodes[i - 1];
            let n = b.substeps.max((gap / max_dt).ceil() as usize);
            let seg = Stepper::new(&grid, &params, gap / n as f64)?.run(&u, nodes[i - 1], n, n, AMPLITUDE_CAP)?;
            drift = drift.max((seg.final_state().mean_mode() - phi.mean_mode()).norm());
            u = seg.final_state().clone();
            distance = distance.max(u.sub(&sol.trajectory.states()[i])?.l2_norm());
        }
        Ok(Member {
            norm,
            horizon,
            iterations: sol.iterations,
            max_ratio: sol.ratios.iter().copied().fold(0.0, f64::max),
            residual: sol.residual,
            distance,
            drift: drift.max(mass_drift(&sol.trajectory)),
        })
    })?;

    let mut report = ExperimentReport::new(
        "contraction",
        &["amplitude", "phi_norm", "horizon", "iterations", "max_ratio", "residual", "distance", "mass_drift"],
    );
    for (amp, m) in b.amplitudes.iter().zip(&members) {
        report.push_row(vec![
            *amp,
            m.norm,
            m.horizon,
            m.iterations as f64,
            m.max_ratio,
            m.residual,
            m.distance,
            m.drift,
        ]);
    }
    let worst = |f: fn(&Member) -> f64| members.iter().map(f).fold(0.0, f64::max);
    report.push_check(Check::at_most("max_ratio", worst(|m| m.max_ratio), b.ratio_max));
    report.push_check(Check::at_most("residual", worst(|m| m.residual), b.residual_max));
    report.push_check(Check::at_most("iterations", worst(|m| m.iterations as f64), b.max_iterations as f64));
    report.push_check(Check::at_most("picard_stepper_distance", worst(|m| m.distance), b.agreement));
    report.push_check(Check::at_most("mass_drift", worst(|m| m.drift), b.mass_tolerance));
    Ok(Outcome::new(cfg.experiment, vec![report]))
}

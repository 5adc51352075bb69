use chenlee_core::decay::{listo_functional, moment_trace, weighted_energy_rate, yacasi_identity_residual};
use chenlee_core::report::Check;
use chenlee_core::solver::{solve_stepper, SolverConfig};
use chenlee_core::ExperimentReport;

use super::{initial_data, Outcome};
use crate::config::RunConfig;
use crate::error::Result;

/// Moment trace of one run, the weighted-energy identity at `dt` and
/// `dt/2` (same `save_every`, so the difference step halves as well).
pub(super) fn run(cfg: &RunConfig) -> Result<Outcome> {
    let b = &cfg.decay;
    let grid = cfg.grid.build("grid.modes")?;
    let params = cfg.equation.params();
    let phi = initial_data(&grid, b.data, b.amplitude, b.width, cfg.seed);
    let coarse_cfg = cfg.solver.solver();
    let fine_cfg = SolverConfig { dt: 0.5 * coarse_cfg.dt, ..coarse_cfg };
    let (coarse, fine) =
        rayon::join(|| solve_stepper(&phi, &params, &coarse_cfg), || solve_stepper(&phi, &params, &fine_cfg));
    let (coarse, fine) = (coarse?, fine?);

    let m = moment_trace(&coarse)?;
    let mut moments =
        ExperimentReport::new("moments", &["t", "re_mass", "im_mass", "re_dmass", "l2sq", "w1", "w2", "w3", "listo"]);
    let mut listo_min = f64::INFINITY;
    for i in 0..m.times.len() {
        let t = m.times[i];
        let listo = listo_functional(&coarse, t)?;
        if t > 0.0 {
            listo_min = listo_min.min(listo);
        }
        let w = &m.weighted[i];
        moments.push_row(vec![
            t,
            m.mass[i].re,
            m.mass[i].im,
            m.dmass[i].re,
            m.l2sq[i],
            w[0].value,
            w[1].value,
            w[2].value,
            listo,
        ]);
    }
    let yacasi = yacasi_identity_residual(&coarse)?;
    moments.push_check(Check::at_most("yacasi_residual", yacasi, b.yacasi_max));
    moments.push_check(Check::at_most("mass_drift", m.mass_drift(), b.mass_tolerance));
    moments.push_check(Check::at_least("listo_min", listo_min, f64::MIN_POSITIVE));
    let unfaithful = m.weighted.iter().flatten().filter(|w| !w.is_faithful()).count();
    moments.push_metric("unfaithful_weighted_norms", unfaithful as f64);

    let mut energy = weighted_energy_rate(&coarse)?;
    let fine_energy = weighted_energy_rate(&fine)?;
    energy.name = "weighted_energy".into();
    let a = energy.metric("max_residual").unwrap_or(f64::NAN);
    let r = fine_energy.metric("max_residual").unwrap_or(f64::NAN);
    energy.push_metric("max_residual_half_dt", r);
    energy.push_check(Check::at_most("energy_residual", a, b.energy_residual_max));
    energy.push_check(Check::at_least("halving_ratio", a / r, b.halving_ratio_min));
    Ok(Outcome::new(cfg.experiment, vec![moments, energy]))
}

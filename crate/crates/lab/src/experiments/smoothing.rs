use chenlee_core::fields::{random_smooth, rough_band_limited};
use chenlee_core::norms::{f_lambda, smoothing_multiplier_sup, sobolev_norm, FittedConstant};
use chenlee_core::report::{fit_loglog, Check};
use chenlee_core::spectral::semigroup_apply;
use chenlee_core::{EquationParams, ExperimentReport};
use rayon::prelude::*;

use super::{sweep, Outcome};
use crate::config::{RunConfig, SmoothingBlock};
use crate::error::Result;

pub(super) fn run(cfg: &RunConfig) -> Result<Outcome> {
    let b = &cfg.smoothing;
    Ok(Outcome::new(cfg.experiment, vec![rate(b, cfg.seed)?, growth(b, cfg.seed)?, multiplier(b)?]))
}

fn log_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}

/// `‖S(t)φ‖_{H^λ}` for rough band-limited `φ` over log-spaced `t`.
fn rate(b: &SmoothingBlock, seed: u64) -> Result<ExperimentReport> {
    let grid = b.grid.build("smoothing.grid.modes")?;
    let params = EquationParams::new(b.beta, b.eta, false)?;
    let phi = rough_band_limited(&grid, seed, b.band_lo, b.band_hi, b.decay);
    let times = log_spaced(b.t_min, b.t_max, b.points);
    let states = sweep(&times, |t| semigroup_apply(&phi, *t, &params))?;

    let names: Vec<String> = b.lambdas.iter().map(|l| format!("norm_lambda_{l}")).collect();
    let mut columns = vec!["t"];
    columns.extend(names.iter().map(String::as_str));
    let mut report = ExperimentReport::new("smoothing", &columns);
    let norms: Vec<Vec<f64>> =
        states.iter().map(|u| b.lambdas.iter().map(|l| sobolev_norm(u, *l)).collect()).collect();
    for (t, row) in times.iter().zip(&norms) {
        let mut r = vec![*t];
        r.extend(row);
        report.push_row(r);
    }
    for (i, lambda) in b.lambdas.iter().enumerate() {
        let ys: Vec<f64> = norms.iter().map(|r| r[i]).collect();
        let fit = fit_loglog(&times, &ys)?;
        let target = -lambda / 2.0;
        report.push_check(Check::within(
            &format!("slope_lambda_{lambda}"),
            fit.slope,
            target,
            b.slope_tolerance * target.abs(),
        ));
    }
    report.push_metric("datum_l2", phi.l2_norm());
    Ok(report)
}

/// `max_t ‖S(t)φ‖_{H^s} / (e^{ηt/4}‖φ‖_{H^s})` over `t ∈ [0, 1]` for seeded
/// random fields.
fn growth(b: &SmoothingBlock, seed: u64) -> Result<ExperimentReport> {
    let grid = b.growth_grid.build("smoothing.growth_grid.modes")?;
    let times: Vec<f64> = (0..b.growth_times).map(|i| i as f64 / (b.growth_times - 1) as f64).collect();
    let fields: Vec<_> = (0..b.growth_samples as u64)
        .map(|i| random_smooth(&grid, seed.wrapping_add(i), 0.5 + (i % 5) as f64 * 0.5))
        .collect();
    let mut report = ExperimentReport::new("growth", &["s", "eta", "max_ratio", "violations"]);
    let mut total = 0usize;
    let mut worst: f64 = 0.0;
    for &eta in &b.growth_etas {
        let params = EquationParams::new(b.beta, eta, false)?;
        for &s in &b.growth_indices {
            let ratios = sweep(&fields, |phi| {
                let n0 = sobolev_norm(phi, s);
                let mut r: f64 = 0.0;
                for &t in &times {
                    let n = sobolev_norm(&semigroup_apply(phi, t, &params)?, s);
                    r = r.max(n / ((eta * t / 4.0).exp() * n0));
                }
                Ok(r)
            })?;
            // equality at t = 0 up to rounding
            let violations = ratios.iter().filter(|r| **r > 1.0 + 1e-12).count();
            let max = ratios.iter().copied().fold(0.0, f64::max);
            report.push_row(vec![s, eta, max, violations as f64]);
            total += violations;
            worst = worst.max(max);
        }
    }
    report.push_metric("max_ratio", worst);
    report.push_check(Check::at_most("growth_violations", total as f64, 0.0));
    Ok(report)
}

/// Brute-force `sup_ξ |tξ²|^λ e^{η(|ξ|-ξ²)t}` against `f_λ(t)`.
fn multiplier(b: &SmoothingBlock) -> Result<ExperimentReport> {
    let times = log_spaced(b.multiplier_t_min, b.multiplier_t_max, b.multiplier_times);
    let mut cases = Vec::new();
    for &t in &times {
        for &lambda in &b.lambdas {
            for &eta in &b.growth_etas {
                cases.push((t, lambda, eta));
            }
        }
    }
    let sups: Vec<f64> = cases
        .par_iter()
        .map(|(t, l, e)| smoothing_multiplier_sup(*t, *l, *e, b.multiplier_xi_max, b.multiplier_xi_points))
        .collect();
    let mut report = ExperimentReport::new("multiplier", &["t", "lambda", "eta", "sup", "f_lambda", "ratio"]);
    let mut pairs = Vec::with_capacity(cases.len());
    for ((t, l, e), sup) in cases.iter().zip(&sups) {
        let f = f_lambda(*t, *l, *e);
        report.push_row(vec![*t, *l, *e, *sup, f, sup / f]);
        pairs.push((*sup, f));
    }
    let c = FittedConstant::calibrate(pairs.iter().copied())?;
    report.push_check(Check::at_most("multiplier_constant", c.value, b.multiplier_constant_max));
    report.push_check(Check::at_most("multiplier_violations", c.violations(pairs, 0.0) as f64, 0.0));
    Ok(report)
}

//! Singular limits: `β → 0` (towards the non-dispersive equation) and
//! `η → 0` (towards Benjamin-Ono).

use alloc::boxed::Box;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::fields::random_smooth;
use crate::grid::{Grid, SpectralField};
use crate::norms::sobolev_norm;
use crate::report::{fit_loglog, Check, ExperimentReport};
use crate::solver::{solve, SolverConfig, Trajectory};
use crate::spectral::{derivative, product, EquationParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LimitKind {
    Beta,
    Eta,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimitSweepConfig {
    pub base_params: EquationParams,
    /// Positive, strictly decreasing, at least four values.
    pub sweep_values: Vec<f64>,
    /// Index of the error norm (`β` sweep) or of the `ρ` bound (`η` sweep).
    pub s: f64,
    pub phi: SpectralField,
    /// `solver.t_final` is the common horizon `T`.
    pub solver: SolverConfig,
    pub slope_tolerance: f64,
    /// Monotonicity slack of the `β` sweep.
    pub monotone_slack: f64,
    /// `C_s` of the `ρ` bound (`η` sweep only).
    pub kato_constant: f64,
}

impl LimitSweepConfig {
    pub fn validate(&self, kind: LimitKind) -> Result<()> {
        self.base_params.validate()?;
        self.solver.validate()?;
        if self.sweep_values.len() < 4 {
            return Err(Error::param("sweep_values", "need at least four values"));
        }
        if self.sweep_values.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::param("sweep_values", "must be positive"));
        }
        if self.sweep_values.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::param("sweep_values", "must be strictly decreasing"));
        }
        match kind {
            LimitKind::Beta => {
                if self.base_params.eta <= 0.0 {
                    return Err(Error::param("eta", "the beta sweep needs eta > 0"));
                }
                if self.s <= -0.5 {
                    return Err(Error::param("s", "the beta sweep needs s > -1/2"));
                }
            }
            LimitKind::Eta => {
                if self.base_params.beta <= 0.0 {
                    return Err(Error::param("beta", "the eta sweep needs beta > 0"));
                }
                if self.s <= 1.5 {
                    return Err(Error::param("s", "the eta sweep needs s > 3/2"));
                }
                if !(self.kato_constant > 0.0) {
                    return Err(Error::param("kato_constant", "must be positive"));
                }
            }
        }
        Ok(())
    }

    pub fn params_for(&self, kind: LimitKind, value: f64) -> EquationParams {
        match kind {
            LimitKind::Beta => self.base_params.with_beta(value),
            LimitKind::Eta => self.base_params.with_eta(value),
        }
    }

    /// Every parameter value a sweep solves for, the limit `0` first. The
    /// `η` sweep also needs each `η/2`.
    pub fn run_values(&self, kind: LimitKind) -> Vec<f64> {
        let mut v = alloc::vec![0.0];
        v.extend(self.sweep_values.iter().copied());
        if kind == LimitKind::Eta {
            for x in &self.sweep_values {
                let h = 0.5 * x;
                if !v.iter().any(|y| (y - h).abs() <= 1e-12 * x) {
                    v.push(h);
                }
            }
        }
        v
    }
}

/// Solves one member of a sweep.
pub fn sweep_member(cfg: &LimitSweepConfig, kind: LimitKind, value: f64) -> Result<Trajectory> {
    solve(&cfg.phi, &cfg.params_for(kind, value), &cfg.solver)
}

fn solve_all(cfg: &LimitSweepConfig, kind: LimitKind) -> Result<Vec<(f64, Trajectory)>> {
    let mut out = Vec::new();
    for v in cfg.run_values(kind) {
        match sweep_member(cfg, kind, v) {
            Ok(tr) => out.push((v, tr)),
            Err(e) => return Err(Error::SweepAborted { completed: out.len(), cause: Box::new(e) }),
        }
    }
    Ok(out)
}

fn lookup(runs: &[(f64, Trajectory)], v: f64) -> Result<&Trajectory> {
    runs.iter()
        .find(|(x, _)| (x - v).abs() <= 1e-12 * v.abs().max(1e-300))
        .or_else(|| runs.iter().find(|(x, _)| *x == v))
        .map(|(_, t)| t)
        .ok_or(Error::param("runs", "missing sweep member"))
}

fn push_rows(report: &mut ExperimentReport, values: &[f64], errors: &[f64], slope: f64, target: f64, pass: bool) {
    for (v, e) in values.iter().zip(errors) {
        report.push_row(alloc::vec![*v, *e, slope, target, if pass { 1.0 } else { 0.0 }]);
    }
}

const COLUMNS: [&str; 5] = ["value", "sup_error", "fitted_slope", "target_slope", "pass"];

/// `E(β) = sup_t ‖u^β(t) - u⁰(t)‖_{H^s}` with slope target 1, from
/// already computed runs (`runs` must hold `0` and every sweep value).
pub fn beta_report(cfg: &LimitSweepConfig, runs: &[(f64, Trajectory)]) -> Result<ExperimentReport> {
    let reference = lookup(runs, 0.0)?;
    let errors = cfg
        .sweep_values
        .iter()
        .map(|&b| lookup(runs, b)?.sup_distance(reference, cfg.s))
        .collect::<Result<Vec<f64>>>()?;
    let fit = fit_loglog(&cfg.sweep_values, &errors)?;
    let slope_check = Check::within("slope", fit.slope, 1.0, cfg.slope_tolerance);
    let worst_growth = errors.windows(2).map(|w| w[1] / w[0]).fold(0.0, f64::max);
    let monotone = Check::at_most("monotone_ratio", worst_growth, 1.0 + cfg.monotone_slack);
    let mut report = ExperimentReport::new("beta-limit", &COLUMNS);
    push_rows(&mut report, &cfg.sweep_values, &errors, fit.slope, 1.0, slope_check.passed() && monotone.passed());
    report.push_check(slope_check);
    report.push_check(monotone);
    Ok(report)
}

pub fn beta_limit_sweep(cfg: &LimitSweepConfig) -> Result<ExperimentReport> {
    cfg.validate(LimitKind::Beta)?;
    beta_report(cfg, &solve_all(cfg, LimitKind::Beta)?)
}

/// Cauchy differences `sup_t ‖u^η - u^{η/2}‖_{L²}` with slope target ½,
/// distances to the `η = 0` run, and the `ρ(t)` bound on every member.
pub fn eta_report(cfg: &LimitSweepConfig, runs: &[(f64, Trajectory)]) -> Result<ExperimentReport> {
    let reference = lookup(runs, 0.0)?;
    let mut to_limit = Vec::new();
    let mut cauchy = Vec::new();
    for &eta in &cfg.sweep_values {
        let u = lookup(runs, eta)?;
        to_limit.push(u.sup_distance(reference, 0.0)?);
        cauchy.push(u.sup_distance(lookup(runs, 0.5 * eta)?, 0.0)?);
    }
    let fit = fit_loglog(&cfg.sweep_values, &cauchy)?;
    let limit_fit = fit_loglog(&cfg.sweep_values, &to_limit)?;
    let phi_norm = sobolev_norm(&cfg.phi, cfg.s);
    let mut worst: f64 = 0.0;
    for (eta, tr) in runs {
        if *eta >= 1.0 {
            continue;
        }
        for (t, u) in tr.times().iter().zip(tr.states()) {
            worst = worst.max(sobolev_norm(u, cfg.s) / rho_bound(*t, phi_norm, cfg.kato_constant)?);
        }
    }
    let slope_check = Check::within("cauchy_slope", fit.slope, 0.5, cfg.slope_tolerance);
    // equality holds at t = 0, so allow rounding
    let rho_check = Check::at_most("norm_over_rho", worst, 1.0 + 1e-12);
    let mut report = ExperimentReport::new("eta-limit", &COLUMNS);
    push_rows(&mut report, &cfg.sweep_values, &cauchy, fit.slope, 0.5, slope_check.passed() && rho_check.passed());
    report.push_check(slope_check);
    report.push_check(rho_check);
    report.push_metric("limit_slope", limit_fit.slope);
    for (eta, d) in cfg.sweep_values.iter().zip(&to_limit) {
        report.push_metric(&alloc::format!("limit_error_{eta}"), *d);
    }
    report.push_metric("horizon", cfg.solver.t_final);
    Ok(report)
}

pub fn eta_limit_sweep(cfg: &LimitSweepConfig) -> Result<ExperimentReport> {
    cfg.validate(LimitKind::Eta)?;
    let horizon = blowup_time(sobolev_norm(&cfg.phi, cfg.s), cfg.kato_constant);
    if cfg.solver.t_final >= horizon {
        return Err(Error::param("t_final", "must lie below the rho-bound blow-up time"));
    }
    eta_report(cfg, &solve_all(cfg, LimitKind::Eta)?)
}

/// `T'_s = (2/C_s) ln((1+‖φ‖)/‖φ‖)`.
pub fn blowup_time(phi_norm: f64, c_s: f64) -> f64 {
    if phi_norm == 0.0 {
        return f64::INFINITY;
    }
    2.0 / c_s * libm::log((1.0 + phi_norm) / phi_norm)
}

/// `ρ(t) = e^{C_s t/2}‖φ‖ / (1 + ‖φ‖ - e^{C_s t/2}‖φ‖)`, finite for `t < T'_s`.
pub fn rho_bound(t: f64, phi_norm: f64, c_s: f64) -> Result<f64> {
    if !(c_s > 0.0) {
        return Err(Error::param("C_s", "must be positive"));
    }
    if !(phi_norm >= 0.0) {
        return Err(Error::param("phi_norm", "must be non-negative"));
    }
    if t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    let limit = blowup_time(phi_norm, c_s);
    if t >= limit {
        return Err(Error::TimeOutOfRange { t, start: 0.0, end: limit });
    }
    let e = libm::exp(0.5 * c_s * t) * phi_norm;
    Ok(e / (1.0 + phi_norm - e))
}

/// `|(u, u∂_x u)_s| / (‖∂_x u‖_{H^{s-1}} ‖u‖²_{H^s})`.
pub fn kato_quadratic_form(u: &SpectralField, s: f64) -> Result<f64> {
    if !(s > 1.5) {
        return Err(Error::param("s", "needs s > 3/2"));
    }
    let ux = derivative(u, 1);
    let dnorm = sobolev_norm(&ux, s - 1.0);
    let unorm = sobolev_norm(u, s);
    if dnorm == 0.0 || unorm == 0.0 {
        return Err(Error::param("u", "ratio undefined for constant or zero fields"));
    }
    let w = product(u, &ux)?;
    let g = u.grid();
    let form: f64 = (0..g.modes())
        .map(|j| {
            let xi = g.xi(j);
            libm::pow(1.0 + xi * xi, s) * (u.coeffs()[j].conj() * w.coeffs()[j]).re
        })
        .sum::<f64>()
        * g.dxi();
    Ok(libm::fabs(form) / (dnorm * unorm * unorm))
}

/// `2 ×` the largest [`kato_quadratic_form`] over `count` seeded random
/// smooth fields.
pub fn calibrate_kato_constant(grid: &Grid, s: f64, count: usize, seed: u64) -> Result<f64> {
    if count == 0 {
        return Err(Error::Empty("calibration set"));
    }
    let mut worst: f64 = 0.0;
    for i in 0..count as u64 {
        let kappa = 0.5 + (i % 5) as f64 * 0.5;
        worst = worst.max(kato_quadratic_form(&random_smooth(grid, seed + i, kappa), s)?);
    }
    Ok(2.0 * worst)
}

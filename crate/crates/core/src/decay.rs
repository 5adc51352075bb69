//! Mass, first moment and weighted-energy diagnostics along trajectories.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::SpectralField;
use crate::norms::{moment_norm, sobolev_norm, FittedConstant, WeightedNorm};
use crate::quad::{simpson_uniform, GaussLegendre};
use crate::report::{Check, ExperimentReport};
use crate::solver::Trajectory;
use crate::spectral::{derivative, hilbert_transform};

#[derive(Debug, Clone, PartialEq)]
pub struct MomentTrace {
    pub times: Vec<f64>,
    /// `û(t, 0)`.
    pub mass: Vec<Complex64>,
    /// `∂_ξ û(t, 0)`.
    pub dmass: Vec<Complex64>,
    /// `‖u(t)‖²_{L²}`.
    pub l2sq: Vec<f64>,
    /// `‖x u‖, ‖x² u‖, ‖x³ u‖` with their boundary shares. Only the first
    /// is required to stay inside the box; the others are reported.
    pub weighted: Vec<[WeightedNorm; 3]>,
}

impl MomentTrace {
    /// Largest `|û(t,0) - û(0,0)|`.
    pub fn mass_drift(&self) -> f64 {
        let m0 = self.mass[0];
        self.mass.iter().map(|m| (m - m0).norm()).fold(0.0, f64::max)
    }
}

fn inv_sqrt_2pi() -> f64 {
    1.0 / libm::sqrt(2.0 * PI)
}

/// `∂_ξ û(0) = -i (2π)^{-1/2} ∫ x u(x) dx` by the rectangle rule.
pub fn first_moment(u: &SpectralField) -> Complex64 {
    let g = u.grid();
    let m: f64 = u.to_samples().iter().enumerate().map(|(j, v)| g.x(j) * v).sum::<f64>() * g.dx();
    Complex64::new(0.0, -inv_sqrt_2pi() * m)
}

pub fn moment_trace(traj: &Trajectory) -> Result<MomentTrace> {
    let mut out = MomentTrace {
        times: traj.times().to_vec(),
        mass: Vec::with_capacity(traj.len()),
        dmass: Vec::with_capacity(traj.len()),
        l2sq: Vec::with_capacity(traj.len()),
        weighted: Vec::with_capacity(traj.len()),
    };
    for u in traj.states() {
        let w = [moment_norm(u, 1), moment_norm(u, 2), moment_norm(u, 3)];
        w[0].checked()?;
        out.mass.push(u.mean_mode());
        out.dmass.push(first_moment(u));
        let n = u.l2_norm();
        out.l2sq.push(n * n);
        out.weighted.push(w);
    }
    Ok(out)
}

/// `max_t |∂_ξ ŵ(t,0) - i (2π)^{-1/2} ‖u(t)‖²|` with `w = ∂_x(u²)`, the
/// left side by moment quadrature. Integrating by parts,
/// `∫ x ∂_x(u²) dx = -‖u‖²`, so the residual is pure quadrature error.
pub fn yacasi_identity_residual(traj: &Trajectory) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for u in traj.states() {
        moment_norm(u, 1).checked()?;
        let w = derivative(&crate::spectral::product(u, u)?, 1);
        let lhs = first_moment(&w);
        let n = u.physical_l2_norm();
        let rhs = Complex64::new(0.0, inv_sqrt_2pi() * n * n);
        worst = worst.max((lhs - rhs).norm());
    }
    Ok(worst)
}

fn uniform_step(times: &[f64]) -> Option<f64> {
    if times.len() < 2 {
        return None;
    }
    let h = times[1] - times[0];
    let tol = 1e-9 * h.abs().max(times[times.len() - 1].abs() * 1e-3);
    times.windows(2).all(|w| libm::fabs(w[1] - w[0] - h) <= tol).then_some(h)
}

/// `∫₀ᵗ (t-τ) ‖u(τ)‖²_{L²} dτ`.
///
/// Composite Simpson over the samples up to `t`; a trailing piece shorter
/// than one sample interval uses Gauss-Legendre on the cubic interpolant
/// of `‖u‖²`.
pub fn listo_functional(traj: &Trajectory, t: f64) -> Result<f64> {
    if traj.start() != 0.0 {
        return Err(Error::param("trajectory", "must start at t = 0"));
    }
    let tol = 1e-12 * traj.end().max(1.0);
    if t < 0.0 || t > traj.end() + tol {
        return Err(Error::TimeOutOfRange { t, start: traj.start(), end: traj.end() });
    }
    let times = traj.times();
    let sq: Vec<f64> = traj.states().iter().map(|u| u.l2_norm() * u.l2_norm()).collect();
    let last = times.partition_point(|&s| s <= t + tol);
    let f = |i: usize| (t - times[i]) * sq[i];
    let mut total = match uniform_step(&times[..last]) {
        Some(h) => simpson_uniform(&(0..last).map(f).collect::<Vec<_>>(), h),
        None => (1..last).map(|i| 0.5 * (times[i] - times[i - 1]) * (f(i) + f(i - 1))).sum(),
    };
    let tail_start = times[last - 1];
    if t - tail_start > tol {
        let (lo, w) = traj.stencil(0.5 * (tail_start + t))?;
        let nodes = &times[lo..lo + w.len()];
        let gl = GaussLegendre::new(4);
        for (tau, wq) in gl.on(tail_start, t) {
            let basis = crate::quad::lagrange_weights(nodes, tau);
            let value: f64 = basis.iter().enumerate().map(|(k, b)| b * sq[lo + k]).sum();
            total += wq * (t - tau) * value;
        }
    }
    Ok(total)
}

fn pairing(weight_u: &[f64], other: &SpectralField, dx: f64) -> f64 {
    weight_u.iter().zip(other.to_samples()).map(|(a, b)| a * b).sum::<f64>() * dx
}

/// Right side of `½ d/dt ‖xu‖² = -(xu, x u u_x) - β(xu, x ℋu_xx)
/// - η(xu, x ℋu_x) + η(xu, x u_xx)`.
pub fn weighted_energy_rhs(u: &SpectralField, beta: f64, eta: f64, nonlinear: bool) -> Result<f64> {
    let g = u.grid();
    let dx = g.dx();
    let samples = u.to_samples();
    let x2u: Vec<f64> = samples.iter().enumerate().map(|(j, v)| g.x(j) * g.x(j) * v).collect();
    let ux = derivative(u, 1);
    let uxx = derivative(u, 2);
    let mut rhs = 0.0;
    if nonlinear {
        let uux: Vec<f64> = samples.iter().zip(ux.to_samples()).map(|(a, b)| a * b).collect();
        rhs -= x2u.iter().zip(&uux).map(|(a, b)| a * b).sum::<f64>() * dx;
    }
    rhs -= beta * pairing(&x2u, &hilbert_transform(&uxx), dx);
    rhs -= eta * pairing(&x2u, &hilbert_transform(&ux), dx);
    rhs += eta * pairing(&x2u, &uxx, dx);
    Ok(rhs)
}

/// Both sides of the weighted energy identity at every interior sample,
/// the left side by centered differences of `‖xu‖²`. Rows are
/// `(t, lhs, rhs, residual)`; metrics carry the largest residual and the
/// Gronwall constant `C` in `d/dt ‖xu‖² ≤ C (‖u‖²_{H²} + ‖xu‖²)`, fitted
/// pointwise and then checked in integrated form against the sampled norms.
pub fn weighted_energy_rate(traj: &Trajectory) -> Result<ExperimentReport> {
    let times = traj.times();
    if times.len() < 3 {
        return Err(Error::Empty("trajectory (need three samples)"));
    }
    let h = uniform_step(times)
        .ok_or(Error::param("trajectory", "centered differences need uniformly spaced samples"))?;
    let p = traj.params();
    let mut xu2 = Vec::with_capacity(times.len());
    let mut bound = Vec::with_capacity(times.len());
    for u in traj.states() {
        let w = moment_norm(u, 1).checked()?;
        xu2.push(w * w);
        let hs = sobolev_norm(u, 2.0);
        bound.push(hs * hs + w * w);
    }
    let mut report = ExperimentReport::new("weighted-energy", &["t", "lhs", "rhs", "residual"]);
    let mut worst: f64 = 0.0;
    let mut pairs = Vec::new();
    // fourth-order stencil when five samples are available
    let wide = times.len() >= 5;
    let interior = if wide { 2..times.len() - 2 } else { 1..times.len() - 1 };
    for i in interior {
        let u = &traj.states()[i];
        let rate = if wide {
            (xu2[i - 2] - 8.0 * xu2[i - 1] + 8.0 * xu2[i + 1] - xu2[i + 2]) / (12.0 * h)
        } else {
            (xu2[i + 1] - xu2[i - 1]) / (2.0 * h)
        };
        let lhs = 0.5 * rate;
        let rhs = weighted_energy_rhs(u, p.beta, p.eta, p.nonlinear)?;
        let residual = libm::fabs(lhs - rhs);
        worst = worst.max(residual);
        report.push_row(alloc::vec![times[i], lhs, rhs, residual]);
        if bound[i] > 0.0 {
            pairs.push((rate.max(0.0), bound[i]));
        }
    }
    report.push_metric("max_residual", worst);
    let fitted = if pairs.is_empty() { FittedConstant { value: 0.0 } } else { FittedConstant::calibrate(pairs)? };
    report.push_metric("gronwall_constant", fitted.value);
    // integrated form: ‖xu(t)‖² ≤ ‖xφ‖² + C ∫₀ᵗ ‖u‖²_{F_{2,1}}
    let mut integral = 0.0;
    let mut violations = 0usize;
    for i in 1..times.len() {
        integral += 0.5 * h * (bound[i - 1] + bound[i]);
        let allowed = xu2[0] + fitted.value * integral;
        if xu2[i] > allowed * (1.0 + 1e-6) + 1e-14 {
            violations += 1;
        }
    }
    report.push_check(Check::at_most("gronwall_violations", violations as f64, 0.0));
    Ok(report)
}

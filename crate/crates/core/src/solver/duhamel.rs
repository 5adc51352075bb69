use alloc::vec::Vec;

use super::Trajectory;
use crate::error::{Error, Result};
use crate::grid::SpectralField;
use crate::quad::GaussLegendre;
use crate::spectral::{nonlinear_term, propagator_table, EquationParams};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DuhamelOptions {
    /// Gauss-Legendre points per panel; the check reruns with twice as many.
    pub order: usize,
    /// Largest `|Λ(ξ)| h` allowed on a panel of width `h`.
    pub max_phase: f64,
    /// Allowed relative change under node doubling.
    pub tolerance: f64,
}

impl Default for DuhamelOptions {
    fn default() -> Self {
        DuhamelOptions { order: 4, max_phase: 1.0, tolerance: 1e-9 }
    }
}

fn accumulate(
    grid_field: &SpectralField,
    params: &EquationParams,
    t: f64,
    panels: &[(f64, f64)],
    order: usize,
    source: &dyn Fn(f64) -> Result<SpectralField>,
) -> Result<SpectralField> {
    let gl = GaussLegendre::new(order);
    let mut out = SpectralField::zeros(grid_field.grid());
    for &(a, b) in panels {
        for (tau, w) in gl.on(a, b) {
            let f = source(tau)?;
            let table = propagator_table(f.grid(), params, t - tau);
            for ((o, c), e) in out.coeffs_mut().iter_mut().zip(f.coeffs()).zip(&table) {
                *o += c * e * w;
            }
        }
    }
    Ok(out)
}

fn panels_on(breaks: &[f64], lmax: f64, max_phase: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for w in breaks.windows(2) {
        let h = w[1] - w[0];
        if h <= 0.0 {
            continue;
        }
        let sub = (libm::ceil(lmax * h / max_phase) as usize).max(1);
        let dh = h / sub as f64;
        for k in 0..sub {
            let a = w[0] + k as f64 * dh;
            out.push((a, if k + 1 == sub { w[1] } else { a + dh }));
        }
    }
    out
}

fn converged(coarse: SpectralField, fine: SpectralField, tolerance: f64) -> Result<SpectralField> {
    let change = fine.sub(&coarse)?.l2_norm();
    let scale = fine.l2_norm();
    if change > tolerance * scale.max(f64::MIN_POSITIVE) && change > 0.0 {
        return Err(Error::QuadratureConvergence {
            change: if scale > 0.0 { change / scale } else { change },
            tolerance,
        });
    }
    Ok(fine)
}

fn max_exponent(f: &SpectralField, params: &EquationParams) -> f64 {
    let g = f.grid();
    (0..g.modes())
        .filter(|&j| f.coeffs()[j].norm() > 0.0)
        .map(|j| params.exponent(g.xi(j)).norm())
        .fold(0.0, f64::max)
}

/// `∫₀ᵗ S(t-τ) F(τ) dτ` for a source given pointwise in time.
///
/// The semigroup is applied exactly at each quadrature node. `panels`
/// uniform panels are refined until `|Λ| h ≤ max_phase` on the source's
/// support at `τ = 0`.
pub fn duhamel_with(
    source: impl Fn(f64) -> Result<SpectralField>,
    t: f64,
    params: &EquationParams,
    panels: usize,
    opts: &DuhamelOptions,
) -> Result<SpectralField> {
    if t < 0.0 || t.is_nan() {
        return Err(Error::NegativeTime(t));
    }
    if panels == 0 || opts.order == 0 {
        return Err(Error::param("panels", "need at least one panel and one node"));
    }
    let probe = source(0.0)?;
    if t == 0.0 {
        return Ok(SpectralField::zeros(probe.grid()));
    }
    let breaks: Vec<f64> = (0..=panels).map(|i| t * i as f64 / panels as f64).collect();
    let pans = panels_on(&breaks, max_exponent(&probe, params), opts.max_phase);
    let coarse = accumulate(&probe, params, t, &pans, opts.order, &source)?;
    let fine = accumulate(&probe, params, t, &pans, 2 * opts.order, &source)?;
    converged(coarse, fine, opts.tolerance)
}

/// `∫₀ᵗ S(t-τ) ½∂_x(u²)(τ) dτ` along a computed trajectory, with the
/// nonlinear term interpolated cubically between the saved samples.
/// Vanishes identically for the linear equation.
pub fn duhamel_integral(traj: &Trajectory, t: f64, opts: &DuhamelOptions) -> Result<SpectralField> {
    let params = traj.params();
    if t < traj.start() || t > traj.end() * (1.0 + 1e-12) + 1e-15 {
        return Err(Error::TimeOutOfRange { t, start: traj.start(), end: traj.end() });
    }
    if traj.start() != 0.0 {
        return Err(Error::param("trajectory", "must start at t = 0"));
    }
    if !params.nonlinear || t == 0.0 {
        return Ok(SpectralField::zeros(traj.grid()));
    }
    let sources: Vec<SpectralField> = traj.states().iter().map(nonlinear_term).collect();
    let times = traj.times();
    let source = |tau: f64| -> Result<SpectralField> {
        let (lo, w) = traj.stencil(tau)?;
        let mut f = SpectralField::zeros(traj.grid());
        for (k, wk) in w.iter().enumerate() {
            f.axpy((*wk).into(), &sources[lo + k])?;
        }
        Ok(f)
    };
    let mut breaks: Vec<f64> = times.iter().copied().filter(|&s| s < t).collect();
    breaks.push(t);
    let lmax = sources.iter().map(|f| max_exponent(f, params)).fold(0.0, f64::max);
    let pans = panels_on(&breaks, lmax, opts.max_phase);
    let coarse = accumulate(&sources[0], params, t, &pans, opts.order, &source)?;
    let fine = accumulate(&sources[0], params, t, &pans, 2 * opts.order, &source)?;
    converged(coarse, fine, opts.tolerance)
}

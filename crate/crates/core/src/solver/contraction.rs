use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::fields::{gaussian, random_smooth};
use crate::grid::{Grid, SpectralField};
use crate::norms::sobolev_norm;
use crate::quad::phi1;
use crate::spectral::{derivative, product, EquationParams};

/// Bilinear constant calibrated with [`calibrate_bilinear_constant`] on
/// [`default_probe_set`] for `s = 0`, `β = η = 1`, probe times
/// `{0.05, 0.1, 0.25, 0.5, 1}`.
pub const DEFAULT_CONTRACTION_CONSTANT: f64 = 1.284_025_416_687_741_4;

/// Time exponent of the bilinear estimate: `(1+2s)/4` for `-½ < s < 0`,
/// `¼` for `s ≥ 0`.
pub fn time_exponent(s: f64) -> Result<f64> {
    if !(s.is_finite() && s > -0.5) {
        return Err(Error::param("s", "the contraction argument needs s > -1/2"));
    }
    Ok(if s < 0.0 { (1.0 + 2.0 * s) / 4.0 } else { 0.25 })
}

/// Local existence time `T = min{1, (4Cγ)^{-1/g(s)}}` with `γ = 2C‖φ‖`.
pub fn contraction_time(phi_norm: f64, s: f64, eta: f64, c: f64) -> Result<f64> {
    let g = time_exponent(s)?;
    if !(phi_norm.is_finite() && phi_norm >= 0.0) {
        return Err(Error::param("phi_norm", "must be finite and non-negative"));
    }
    if !(eta.is_finite() && eta >= 0.0) {
        return Err(Error::param("eta", "must be finite and non-negative"));
    }
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::param("C", "must be positive"));
    }
    if phi_norm == 0.0 {
        return Ok(1.0);
    }
    let gamma = 2.0 * c * phi_norm;
    Ok(libm::pow(4.0 * c * gamma, -1.0 / g).min(1.0))
}

fn x_norm(samples: &[(f64, SpectralField)], s: f64) -> f64 {
    samples
        .iter()
        .map(|(tau, f)| {
            let base = sobolev_norm(f, s);
            if s < 0.0 {
                base + libm::pow(*tau, s.abs() / 2.0) * f.l2_norm()
            } else {
                base
            }
        })
        .fold(0.0, f64::max)
}

/// `‖∫₀^τ S(τ-τ')∂_x(u²) dτ'‖_{X_t^s} / (t^{g(s)} ‖u‖²_{X_t^s})` for a
/// probe `u` held constant in time; the time integral is exact per mode.
pub fn bilinear_ratio(u: &SpectralField, params: &EquationParams, s: f64, t: f64) -> Result<f64> {
    let g = time_exponent(s)?;
    if !(t > 0.0) {
        return Err(Error::param("t", "must be positive"));
    }
    let w = derivative(&product(u, u)?, 1);
    let samples: Vec<(f64, SpectralField)> = (1..=8)
        .map(|k| {
            let tau = t * k as f64 / 8.0;
            (tau, w.apply_multiplier(|xi| phi1(params.exponent(xi), tau)))
        })
        .collect();
    let num = x_norm(&samples, s);
    let un = x_norm(&[(t, u.clone())], s);
    if un == 0.0 {
        return Err(Error::param("probe", "must be non-zero"));
    }
    Ok(num / (libm::pow(t, g) * un * un))
}

/// Gaussians of three widths and five seeded random smooth fields on
/// `L = 16, M = 256`.
pub fn default_probe_set() -> Vec<SpectralField> {
    let grid = Grid::new(16.0, 256).expect("valid grid");
    let mut probes: Vec<SpectralField> = [0.5, 1.0, 2.0].iter().map(|w| gaussian(&grid, 1.0, *w)).collect();
    probes.extend((0..5).map(|seed| random_smooth(&grid, seed, 1.0)));
    probes
}

/// `C = max(e^{η/4}, max ratio)` over probes and times `t ≤ 1`; the first
/// term bounds the linear part of the map on `[0, 1]`.
pub fn calibrate_bilinear_constant(
    probes: &[SpectralField],
    params: &EquationParams,
    s: f64,
    times: &[f64],
) -> Result<f64> {
    if probes.is_empty() || times.is_empty() {
        return Err(Error::Empty("probe set"));
    }
    if times.iter().any(|t| !(*t > 0.0 && *t <= 1.0)) {
        return Err(Error::param("times", "probe times must lie in (0, 1]"));
    }
    let mut c = libm::exp(params.eta / 4.0);
    for u in probes {
        for &t in times {
            c = c.max(bilinear_ratio(u, params, s, t)?);
        }
    }
    Ok(c)
}

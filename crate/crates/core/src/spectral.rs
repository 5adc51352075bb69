//! Linear symbols, the Hilbert transform, the exact semigroup and the
//! dealiased quadratic nonlinearity.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{Grid, SpectralField};

/// Fraction of `u²` energy allowed above the 2/3 cutoff before
/// [`nonlinear_term_checked`] complains.
pub const DEFAULT_ALIASING_BUDGET: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquationParams {
    /// Dispersion `β ≥ 0`.
    pub beta: f64,
    /// Instability/dissipation strength `η ≥ 0`. `η = 0` is Benjamin-Ono.
    pub eta: f64,
    /// Whether `u u_x` is present.
    pub nonlinear: bool,
}

impl Default for EquationParams {
    fn default() -> Self {
        EquationParams { beta: 1.0, eta: 1.0, nonlinear: true }
    }
}

impl EquationParams {
    pub fn new(beta: f64, eta: f64, nonlinear: bool) -> Result<Self> {
        let p = EquationParams { beta, eta, nonlinear };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.beta.is_finite() && self.beta >= 0.0) {
            return Err(Error::param("beta", "must be finite and non-negative"));
        }
        if !(self.eta.is_finite() && self.eta >= 0.0) {
            return Err(Error::param("eta", "must be finite and non-negative"));
        }
        Ok(())
    }

    pub fn with_beta(self, beta: f64) -> Self {
        EquationParams { beta, ..self }
    }

    pub fn with_eta(self, eta: f64) -> Self {
        EquationParams { eta, ..self }
    }

    pub fn linear(self) -> Self {
        EquationParams { nonlinear: false, ..self }
    }

    /// Dispersion symbol `q(ξ) = β ξ |ξ|`.
    pub fn q(&self, xi: f64) -> f64 {
        symbol_q(xi, self)
    }

    /// Dissipation symbol `p(ξ) = η (ξ² - |ξ|)`.
    pub fn p(&self, xi: f64) -> f64 {
        symbol_p(xi, self)
    }

    /// Exponent of the linear propagator, `Λ(ξ) = i q(ξ) - p(ξ)`.
    pub fn exponent(&self, xi: f64) -> Complex64 {
        Complex64::new(-self.p(xi), self.q(xi))
    }

    /// `E(ξ, t) = exp(i q(ξ) t - p(ξ) t)`.
    pub fn propagator(&self, xi: f64, t: f64) -> Complex64 {
        (self.exponent(xi) * t).exp()
    }
}

pub fn symbol_q(xi: f64, params: &EquationParams) -> f64 {
    params.beta * xi * libm::fabs(xi)
}

pub fn symbol_p(xi: f64, params: &EquationParams) -> f64 {
    params.eta * (xi * xi - libm::fabs(xi))
}

/// `sgn` with `sgn(0) = 0`.
pub fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// `ℋf = (i sgn(ξ) f̂)^∨`.
pub fn hilbert_transform(f: &SpectralField) -> SpectralField {
    f.apply_multiplier(|xi| Complex64::new(0.0, sign(xi)))
}

/// `∂_x^n f`.
pub fn derivative(f: &SpectralField, order: u32) -> SpectralField {
    f.apply_multiplier(|xi| Complex64::new(0.0, xi).powu(order))
}

/// `S(t) f`, the exact linear evolution. Forward in time only.
pub fn semigroup_apply(f: &SpectralField, t: f64, params: &EquationParams) -> Result<SpectralField> {
    if t < 0.0 || t.is_nan() {
        return Err(Error::NegativeTime(t));
    }
    Ok(f.apply_multiplier(|xi| params.propagator(xi, t)))
}

/// Multiplier table `E(ξ_j, t)` in storage order; Nyquist entry is zero.
pub fn propagator_table(grid: &Grid, params: &EquationParams, t: f64) -> Vec<Complex64> {
    let ny = grid.nyquist_index();
    (0..grid.modes())
        .map(|j| if j == ny { Complex64::new(0.0, 0.0) } else { params.propagator(grid.xi(j), t) })
        .collect()
}

struct Squared {
    spectrum: SpectralField,
}

fn dealiased_square(u: &SpectralField) -> Squared {
    let grid = u.grid();
    let cutoff = grid.dealias_cutoff();
    let samples: Vec<f64> = u.truncated(cutoff).to_samples().into_iter().map(|v| v * v).collect();
    let spectrum = SpectralField::from_samples(grid, &samples).expect("sample count matches grid");
    Squared { spectrum }
}

fn half_derivative_truncated(sq: &SpectralField) -> SpectralField {
    let grid = sq.grid();
    let cutoff = grid.dealias_cutoff();
    let mut out = sq.truncated(cutoff).apply_multiplier(|xi| Complex64::new(0.0, 0.5 * xi));
    out.coeffs_mut()[0] = Complex64::new(0.0, 0.0);
    out
}

/// Spectral representation of `u u_x = ½ ∂_x(u²)` with the 2/3 rule
/// applied to both the input and the product. The mean mode is exactly 0.
pub fn nonlinear_term(u: &SpectralField) -> SpectralField {
    half_derivative_truncated(&dealiased_square(u).spectrum)
}

fn upper_fraction(sq: &SpectralField) -> f64 {
    let cutoff = sq.grid().dealias_cutoff();
    let (mut upper, mut total) = (0.0, 0.0);
    for (j, c) in sq.coeffs().iter().enumerate() {
        let e = c.norm_sqr();
        total += e;
        if sq.grid().mode(j).abs() > cutoff {
            upper += e;
        }
    }
    if total == 0.0 {
        0.0
    } else {
        upper / total
    }
}

/// Energy fraction of `u²` above the 2/3 cutoff, before truncation.
pub fn aliasing_fraction(u: &SpectralField) -> f64 {
    upper_fraction(&dealiased_square(u).spectrum)
}

/// [`nonlinear_term`] that refuses to run when the product spectrum above
/// the cutoff carries more than `budget` of the energy.
pub fn nonlinear_term_checked(u: &SpectralField, budget: f64) -> Result<SpectralField> {
    let sq = dealiased_square(u).spectrum;
    let fraction = upper_fraction(&sq);
    if fraction > budget {
        return Err(Error::AliasingBudget { fraction, budget });
    }
    Ok(half_derivative_truncated(&sq))
}

/// Pointwise product of two real fields without dealiasing.
pub fn product(u: &SpectralField, v: &SpectralField) -> Result<SpectralField> {
    if u.grid() != v.grid() {
        return Err(Error::GridMismatch);
    }
    let a = u.to_samples();
    let b = v.to_samples();
    let prod: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x * y).collect();
    SpectralField::from_samples(u.grid(), &prod)
}

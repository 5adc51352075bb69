//! Initial data used by the solvers, calibration sets and experiments.
//! All randomness is seeded.

use core::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::grid::{Grid, SpectralField};
use crate::norms::sobolev_norm;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `a · exp(-x²/w²)`.
pub fn gaussian(grid: &Grid, amplitude: f64, width: f64) -> SpectralField {
    SpectralField::from_fn(grid, |x| amplitude * libm::exp(-(x * x) / (width * width)))
}

/// Smooth compactly supported bump `a · exp(1 - 1/(1 - (x/R)²))` on `|x| < R`.
pub fn bump(grid: &Grid, amplitude: f64, radius: f64) -> SpectralField {
    SpectralField::from_fn(grid, |x| {
        let r = x / radius;
        if libm::fabs(r) < 1.0 {
            amplitude * libm::exp(1.0 - 1.0 / (1.0 - r * r))
        } else {
            0.0
        }
    })
}

/// Finite-smoothness bump `a (1 - (x/R)²)^p` on `|x| < R`.
pub fn polynomial_bump(grid: &Grid, amplitude: f64, radius: f64, power: i32) -> SpectralField {
    SpectralField::from_fn(grid, |x| {
        let r = x / radius;
        if libm::fabs(r) < 1.0 {
            amplitude * libm::pow(1.0 - r * r, power as f64)
        } else {
            0.0
        }
    })
}

/// Hermitian spectrum with random phases and modulus `envelope(|ξ|)`.
/// The mean mode gets modulus `envelope(0)` with a random sign.
pub fn random_phase(grid: &Grid, seed: u64, envelope: impl Fn(f64) -> f64) -> SpectralField {
    let mut r = rng(seed);
    let mut f = SpectralField::zeros(grid);
    let m = grid.modes();
    let sign = if r.gen::<bool>() { 1.0 } else { -1.0 };
    f.coeffs_mut()[0] = Complex64::new(sign * envelope(0.0), 0.0);
    for j in 1..m / 2 {
        let theta = 2.0 * PI * r.gen::<f64>();
        let amp = envelope(grid.xi(j)) * (0.5 + r.gen::<f64>());
        let c = Complex64::from_polar(amp, theta);
        f.coeffs_mut()[j] = c;
        f.coeffs_mut()[m - j] = c.conj();
    }
    f
}

/// Smooth random field with Gaussian spectral envelope of scale `kappa`.
pub fn random_smooth(grid: &Grid, seed: u64, kappa: f64) -> SpectralField {
    random_phase(grid, seed, |xi| libm::exp(-(xi * xi) / (kappa * kappa)))
}

/// Rough band-limited field: `|φ̂(ξ)| ∝ |ξ|^{-decay}` on `lo ≤ |ξ| ≤ hi`,
/// zero elsewhere, random phases of unit modulus factor.
pub fn rough_band_limited(grid: &Grid, seed: u64, lo: f64, hi: f64, decay: f64) -> SpectralField {
    let mut r = rng(seed);
    let mut f = SpectralField::zeros(grid);
    let m = grid.modes();
    for j in 1..m / 2 {
        let xi = grid.xi(j);
        let theta = 2.0 * PI * r.gen::<f64>();
        if xi >= lo && xi <= hi {
            let c = Complex64::from_polar(libm::pow(xi, -decay), theta);
            f.coeffs_mut()[j] = c;
            f.coeffs_mut()[m - j] = c.conj();
        }
    }
    f
}

/// Rescales `f` to unit (or `target`) `H^s` norm. Zero stays zero.
pub fn normalized(f: &SpectralField, s: f64, target: f64) -> SpectralField {
    let n = sobolev_norm(f, s);
    if n == 0.0 {
        f.clone()
    } else {
        f.scaled(target / n)
    }
}

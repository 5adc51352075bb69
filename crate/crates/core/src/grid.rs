//! Periodic Fourier grid and the spectral field type.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft::FftPlan;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Uniform grid on `[-L, L)` with `M` points and frequencies `ξ_k = πk/L`,
/// `k ∈ {-M/2, …, M/2-1}`.
///
/// Coefficients are kept in FFT order: index `j < M/2` holds mode `k = j`,
/// index `j ≥ M/2` holds `k = j - M`. Index `M/2` is the Nyquist mode.
#[derive(Clone)]
pub struct Grid {
    half_length: f64,
    modes: usize,
    plan: Arc<FftPlan>,
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("half_length", &self.half_length)
            .field("modes", &self.modes)
            .finish()
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.modes == other.modes && self.half_length == other.half_length
    }
}

impl Grid {
    pub fn new(half_length: f64, modes: usize) -> Result<Self> {
        if !(half_length.is_finite() && half_length > 0.0) {
            return Err(Error::param("L", "must be positive and finite"));
        }
        if modes < 8 || !modes.is_power_of_two() {
            return Err(Error::param("M", "must be a power of two and at least 8"));
        }
        Ok(Grid { half_length, modes, plan: Arc::new(FftPlan::new(modes)) })
    }

    /// Grid whose frequency spacing is `dxi`, i.e. `L = π / dxi`.
    pub fn with_spacing(dxi: f64, modes: usize) -> Result<Self> {
        if !(dxi.is_finite() && dxi > 0.0) {
            return Err(Error::param("dxi", "must be positive and finite"));
        }
        Grid::new(PI / dxi, modes)
    }

    pub fn half_length(&self) -> f64 {
        self.half_length
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.half_length / self.modes as f64
    }

    /// Frequency spacing `Δξ = π/L`.
    pub fn dxi(&self) -> f64 {
        PI / self.half_length
    }

    pub fn nyquist_index(&self) -> usize {
        self.modes / 2
    }

    /// Signed mode number of storage index `j`.
    pub fn mode(&self, j: usize) -> i64 {
        if j < self.modes / 2 {
            j as i64
        } else {
            j as i64 - self.modes as i64
        }
    }

    /// Storage index of mode `k`, if it is on the grid.
    pub fn index_of(&self, k: i64) -> Option<usize> {
        let half = (self.modes / 2) as i64;
        if k >= -half && k < half {
            Some(if k >= 0 { k as usize } else { (k + self.modes as i64) as usize })
        } else {
            None
        }
    }

    /// Frequency `ξ` of storage index `j`.
    pub fn xi(&self, j: usize) -> f64 {
        self.mode(j) as f64 * self.dxi()
    }

    pub fn frequencies(&self) -> Vec<f64> {
        (0..self.modes).map(|j| self.xi(j)).collect()
    }

    /// Frequencies in increasing order (fftshift ordering).
    pub fn frequencies_shifted(&self) -> Vec<f64> {
        let half = (self.modes / 2) as i64;
        (-half..half).map(|k| k as f64 * self.dxi()).collect()
    }

    /// Largest `|ξ|` among non-Nyquist modes.
    pub fn max_xi(&self) -> f64 {
        ((self.modes / 2 - 1) as f64) * self.dxi()
    }

    /// Physical node `x_j = -L + j Δx`.
    pub fn x(&self, j: usize) -> f64 {
        -self.half_length + j as f64 * self.dx()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.modes).map(|j| self.x(j)).collect()
    }

    /// Largest mode number kept by the 2/3 rule.
    pub fn dealias_cutoff(&self) -> i64 {
        (self.modes / 3) as i64
    }

    pub(crate) fn plan(&self) -> &FftPlan {
        &self.plan
    }

    fn forward_scale(&self) -> f64 {
        self.dx() / libm::sqrt(2.0 * PI)
    }
}

/// Real-valued grid function stored as its Fourier coefficients `û(ξ_k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: Grid,
    coeffs: Vec<Complex64>,
}

fn parity(k: i64) -> f64 {
    if k.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

impl SpectralField {
    pub fn zeros(grid: &Grid) -> Self {
        SpectralField { grid: grid.clone(), coeffs: vec![ZERO; grid.modes()] }
    }

    /// Wraps coefficients already in FFT order.
    pub fn from_coeffs(grid: &Grid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.modes() {
            return Err(Error::param("coeffs", "length must equal the mode count"));
        }
        Ok(SpectralField { grid: grid.clone(), coeffs })
    }

    /// Forward transform of physical samples `u(x_j)`.
    pub fn from_samples(grid: &Grid, samples: &[f64]) -> Result<Self> {
        if samples.len() != grid.modes() {
            return Err(Error::param("samples", "length must equal the mode count"));
        }
        let mut buf: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        grid.plan().forward(&mut buf);
        let scale = grid.forward_scale();
        for (j, c) in buf.iter_mut().enumerate() {
            *c *= scale * parity(grid.mode(j));
        }
        Ok(SpectralField { grid: grid.clone(), coeffs: buf })
    }

    /// Samples `f` at the grid nodes and transforms.
    pub fn from_fn(grid: &Grid, f: impl Fn(f64) -> f64) -> Self {
        let samples: Vec<f64> = grid.nodes().into_iter().map(f).collect();
        Self::from_samples(grid, &samples).expect("sample count matches grid")
    }

    /// Sets `û(ξ_k) = g(ξ_k)` on every non-Nyquist mode. `g` must satisfy
    /// `g(-ξ) = conj(g(ξ))` for the field to be real.
    pub fn from_spectrum(grid: &Grid, g: impl Fn(f64) -> Complex64) -> Self {
        let ny = grid.nyquist_index();
        let coeffs = (0..grid.modes())
            .map(|j| if j == ny { ZERO } else { g(grid.xi(j)) })
            .collect();
        SpectralField { grid: grid.clone(), coeffs }
    }

    /// `cos(ξ_k x)` for grid mode `k ≥ 1` (or the constant 1 for `k = 0`).
    pub fn cosine_mode(grid: &Grid, k: i64) -> Self {
        let xi = k as f64 * grid.dxi();
        Self::from_fn(grid, |x| libm::cos(xi * x))
    }

    pub fn sine_mode(grid: &Grid, k: i64) -> Self {
        let xi = k as f64 * grid.dxi();
        Self::from_fn(grid, |x| libm::sin(xi * x))
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// Coefficient of mode `k`.
    pub fn mode(&self, k: i64) -> Option<Complex64> {
        self.grid.index_of(k).map(|j| self.coeffs[j])
    }

    /// The zero-frequency coefficient `û(0)`.
    pub fn mean_mode(&self) -> Complex64 {
        self.coeffs[0]
    }

    /// Complex physical values (imaginary part vanishes for real fields).
    pub fn to_complex_samples(&self) -> Vec<Complex64> {
        let g = &self.grid;
        let mut buf: Vec<Complex64> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(j, c)| c * parity(g.mode(j)))
            .collect();
        g.plan().inverse(&mut buf);
        let scale = 1.0 / (g.forward_scale() * g.modes() as f64);
        for v in buf.iter_mut() {
            *v *= scale;
        }
        buf
    }

    /// Physical samples `u(x_j)` (real part of the inverse transform).
    pub fn to_samples(&self) -> Vec<f64> {
        self.to_complex_samples().into_iter().map(|c| c.re).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Largest `|û(ξ) - conj(û(-ξ))|` over mode pairs, relative to the
    /// largest coefficient. The Nyquist mode must be real.
    pub fn hermitian_defect(&self) -> f64 {
        let m = self.grid.modes();
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        let mut worst = self.coeffs[0].im.abs();
        worst = worst.max(self.coeffs[m / 2].im.abs());
        for j in 1..m / 2 {
            worst = worst.max((self.coeffs[j] - self.coeffs[m - j].conj()).norm());
        }
        worst / scale
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_defect() <= tol
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Discrete `L²` norm of the coefficients, `(Σ|û|²Δξ)^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        libm::sqrt(self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>() * self.grid.dxi())
    }

    /// Physical grid `L²` norm `(Σ|u_j|²Δx)^{1/2}`.
    pub fn physical_l2_norm(&self) -> f64 {
        let dx = self.grid.dx();
        libm::sqrt(self.to_complex_samples().iter().map(|c| c.norm_sqr()).sum::<f64>() * dx)
    }

    pub fn scaled(&self, a: f64) -> Self {
        SpectralField { grid: self.grid.clone(), coeffs: self.coeffs.iter().map(|c| c * a).collect() }
    }

    fn zip_with(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| f(*a, *b)).collect();
        Ok(SpectralField { grid: self.grid.clone(), coeffs })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    /// `self + a * other`, in place.
    pub fn axpy(&mut self, a: Complex64, other: &Self) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        for (x, y) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *x += a * y;
        }
        Ok(())
    }

    /// Multiplies mode `ξ_k` by `m(ξ_k)`; the Nyquist mode is zeroed.
    pub fn apply_multiplier(&self, m: impl Fn(f64) -> Complex64) -> Self {
        let g = &self.grid;
        let ny = g.nyquist_index();
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(j, c)| if j == ny { ZERO } else { c * m(g.xi(j)) })
            .collect();
        SpectralField { grid: g.clone(), coeffs }
    }

    /// Zeroes every mode with `|k| > cutoff` (and the Nyquist mode).
    pub fn truncated(&self, cutoff: i64) -> Self {
        let g = &self.grid;
        let ny = g.nyquist_index();
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(j, c)| if j == ny || g.mode(j).abs() > cutoff { ZERO } else { *c })
            .collect();
        SpectralField { grid: g.clone(), coeffs }
    }

    /// Moves the field to another grid with the same `L`, copying the
    /// modes both grids share.
    pub fn resampled(&self, grid: &Grid) -> Result<Self> {
        if grid.half_length() != self.grid.half_length() {
            return Err(Error::param("grid", "resampling requires equal half-length"));
        }
        let mut out = SpectralField::zeros(grid);
        let half = (grid.modes().min(self.grid.modes()) / 2) as i64;
        for k in (-half + 1)..half {
            let src = self.grid.index_of(k).expect("mode on source grid");
            let dst = grid.index_of(k).expect("mode on target grid");
            out.coeffs[dst] = self.coeffs[src];
        }
        Ok(out)
    }
}

//! Second and third Picard terms of the flow map at zero and the
//! norm-growth experiments built on them.
//!
//! With `u₁ = S(t)φ` and `B(u,v) = ∫₀ᵗ S(t-τ) ∂_x(uv) dτ`, the terms of
//! degree two and three in `φ` are `u₂ = -½B(u₁,u₁)` and `u₃ = -B(u₁,u₂)`.
//! Both time integrals are done exactly, leaving sums over the discrete
//! frequency grid:
//!
//! ```text
//! û₂(ξ) = -½ iξ (2π)^{-1/2} e^{Λ(ξ)t} Σ_{ξ₁} φ̂(ξ-ξ₁) φ̂(ξ₁) φ₁(σ(ξ,ξ₁), t) Δξ
//! û₃(ξ) = -½ ξ (2π)^{-1} e^{Λ(ξ)t} Σ_{ξ₁,ξ₂} ξ₂ φ̂(ξ₁) φ̂(ξ₂-ξ₁) φ̂(ξ-ξ₂)
//!             · [φ₁(ψ,t) - φ₁(σ(ξ,ξ₂),t)] / σ(ξ₂,ξ₁) Δξ²
//! ```
//!
//! where `φ₁(z,t) = (e^{zt}-1)/z`, `σ(ξ,ξ₁) = Λ(ξ₁) + Λ(ξ-ξ₁) - Λ(ξ)` and
//! `ψ(ξ,ξ₁,ξ₂) = σ(ξ,ξ₂) + σ(ξ₂,ξ₁)`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::fields::rng;
use crate::grid::{Grid, SpectralField};
use crate::norms::{sobolev_norm, sobolev_norm_window};
use crate::quad::{phi1, phi1_divided_difference};
use crate::report::{fit_loglog, Check, ExperimentReport};
use crate::spectral::EquationParams;

/// Fewest grid frequencies allowed inside one band `I_N`.
pub const MIN_BAND_POINTS: usize = 16;

/// Characteristic-function datum `φ̂ = N^{-s} γ^{-1/2} (χ_{I_N}(ξ) + χ_{I_N}(-ξ))`
/// with `I_N = [N, N+2γ]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IllposedData {
    pub n: f64,
    pub epsilon: f64,
    pub gamma: f64,
    pub s: f64,
}

impl IllposedData {
    pub fn new(n: f64, epsilon: f64, gamma: f64, s: f64) -> Result<Self> {
        if !(n.is_finite() && n >= 32.0) {
            return Err(Error::param("N", "must be at least 32"));
        }
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::param("epsilon", "must lie in (0, 1)"));
        }
        if !(gamma > 0.0 && gamma <= n) {
            return Err(Error::param("gamma", "must lie in (0, N]"));
        }
        if !s.is_finite() {
            return Err(Error::param("s", "must be finite"));
        }
        Ok(IllposedData { n, epsilon, gamma, s })
    }

    /// Bandwidth `γ = εN`.
    pub fn c3(n: f64, epsilon: f64, s: f64) -> Result<Self> {
        Self::new(n, epsilon, epsilon * n, s)
    }

    /// Bandwidth `γ = N^{1-ε}`.
    pub fn c2(n: f64, epsilon: f64, s: f64) -> Result<Self> {
        Self::new(n, epsilon, libm::pow(n, 1.0 - epsilon), s)
    }

    /// `t_N = N^{-2-ε}`.
    pub fn t_n(&self) -> f64 {
        libm::pow(self.n, -2.0 - self.epsilon)
    }

    pub fn band(&self) -> (f64, f64) {
        (self.n, self.n + 2.0 * self.gamma)
    }

    pub fn amplitude(&self) -> f64 {
        libm::pow(self.n, -self.s) / libm::sqrt(self.gamma)
    }

    /// Grid with `points_per_band` spacings across `I_N` reaching at least
    /// `xi_max`.
    pub fn grid(&self, points_per_band: usize, xi_max: f64) -> Result<Grid> {
        if points_per_band < MIN_BAND_POINTS {
            return Err(Error::UnresolvedBand { points: points_per_band, required: MIN_BAND_POINTS });
        }
        let dxi = 2.0 * self.gamma / points_per_band as f64;
        let needed = 2 * (libm::ceil(xi_max / dxi) as usize + 2);
        Grid::with_spacing(dxi, needed.next_power_of_two().max(8))
    }
}

/// Resonance functions of the quadratic interaction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonanceKernel {
    pub params: EquationParams,
}

impl ResonanceKernel {
    pub fn new(params: EquationParams) -> Self {
        ResonanceKernel { params }
    }

    /// `σ(ξ,ξ₁) = i(q(ξ₁)+q(ξ-ξ₁)-q(ξ)) - (p(ξ₁)+p(ξ-ξ₁)-p(ξ))`.
    pub fn sigma(&self, xi: f64, xi1: f64) -> Complex64 {
        let p = &self.params;
        Complex64::new(
            -(p.p(xi1) + p.p(xi - xi1) - p.p(xi)),
            p.q(xi1) + p.q(xi - xi1) - p.q(xi),
        )
    }

    /// `ψ(ξ,ξ₁,ξ₂) = σ(ξ,ξ₂) + σ(ξ₂,ξ₁)`.
    pub fn psi(&self, xi: f64, xi1: f64, xi2: f64) -> Complex64 {
        self.sigma(xi, xi2) + self.sigma(xi2, xi1)
    }

    /// Real resonance of the non-dispersive equation, `-(p(ξ₁)+p(ξ-ξ₁)-p(ξ))`.
    pub fn lambda_nd(&self, xi: f64, xi1: f64) -> f64 {
        let p = &self.params;
        -(p.p(xi1) + p.p(xi - xi1) - p.p(xi))
    }

    /// `[φ₁(ψ,t) - φ₁(σ(ξ,ξ₂),t)] / σ(ξ₂,ξ₁)`, evaluated as a divided
    /// difference so that small `σ(ξ₂,ξ₁)` costs no accuracy.
    pub fn bracket(&self, xi: f64, xi1: f64, xi2: f64, t: f64) -> Complex64 {
        let outer = self.sigma(xi, xi2);
        phi1_divided_difference(outer + self.sigma(xi2, xi1), outer, t)
    }

    /// Random triples `(ξ, ξ₁, ξ₂)` with `ξ ∈ [N+3γ, N+4γ]`, `ξ₁ ∈ I_N`,
    /// `ξ₂-ξ₁ ∈ -I_N` and `ξ-ξ₂ ∈ I_N`: the region where the cubic term
    /// is bounded below.
    pub fn sample_region(d: &IllposedData, count: usize, seed: u64) -> Vec<(f64, f64, f64)> {
        let mut r = rng(seed);
        let (lo, hi) = d.band();
        let mut out = Vec::with_capacity(count);
        while out.len() < count {
            let xi = d.n + 3.0 * d.gamma + d.gamma * r.gen::<f64>();
            let xi1 = lo + (hi - lo) * r.gen::<f64>();
            let xi3 = lo + (hi - lo) * r.gen::<f64>();
            let xi2 = xi - xi3;
            let diff = xi1 - xi2;
            if diff >= lo && diff <= hi {
                out.push((xi, xi1, xi2));
            }
        }
        out
    }
}

/// A Picard term together with the data that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct PicardTerm {
    pub order: u8,
    pub t: f64,
    pub field: SpectralField,
    pub data: Option<IllposedData>,
}

impl PicardTerm {
    pub fn norm(&self, s: f64) -> f64 {
        sobolev_norm(&self.field, s)
    }

    pub fn window_norm(&self, s: f64, lo: f64, hi: f64) -> f64 {
        sobolev_norm_window(&self.field, s, lo, hi, true)
    }
}

pub fn build_illposed_datum(d: &IllposedData, grid: &Grid) -> Result<SpectralField> {
    let (lo, hi) = d.band();
    if hi > grid.max_xi() {
        return Err(Error::WindowOutsideGrid { lo, hi, max: grid.max_xi() });
    }
    let slack = 1e-9 * grid.dxi();
    let inside = |xi: f64| {
        let a = libm::fabs(xi);
        a >= lo - slack && a <= hi + slack
    };
    let points = grid.frequencies().into_iter().filter(|&xi| xi > 0.0 && inside(xi)).count();
    if points < MIN_BAND_POINTS {
        return Err(Error::UnresolvedBand { points, required: MIN_BAND_POINTS });
    }
    let a = d.amplitude();
    Ok(SpectralField::from_spectrum(grid, |xi| Complex64::new(if inside(xi) { a } else { 0.0 }, 0.0)))
}

struct Support {
    modes: Vec<i64>,
    values: Vec<Complex64>,
}

fn support(phi: &SpectralField) -> Support {
    let g = phi.grid();
    let ny = g.nyquist_index();
    let (modes, values) = phi
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(j, c)| *j != ny && c.norm() > 0.0)
        .map(|(j, c)| (g.mode(j), *c))
        .unzip();
    Support { modes, values }
}

fn check_time(t: f64) -> Result<()> {
    if t < 0.0 || t.is_nan() {
        return Err(Error::NegativeTime(t));
    }
    Ok(())
}

fn check_window(grid: &Grid, window: Option<(f64, f64)>) -> Result<()> {
    if let Some((lo, hi)) = window {
        if !(lo <= hi && lo >= 0.0) {
            return Err(Error::param("window", "need 0 ≤ lo ≤ hi"));
        }
        if hi > grid.max_xi() {
            return Err(Error::WindowOutsideGrid { lo, hi, max: grid.max_xi() });
        }
    }
    Ok(())
}

fn in_window(xi: f64, window: Option<(f64, f64)>) -> bool {
    match window {
        None => true,
        Some((lo, hi)) => {
            let a = libm::fabs(xi);
            a >= lo && a <= hi
        }
    }
}

/// Second Picard term `u₂(t)`, optionally only on `|ξ| ∈ window`.
pub fn second_term(
    phi: &SpectralField,
    t: f64,
    params: &EquationParams,
    window: Option<(f64, f64)>,
) -> Result<PicardTerm> {
    check_time(t)?;
    let g = phi.grid();
    check_window(g, window)?;
    let kernel = ResonanceKernel::new(*params);
    let sup = support(phi);
    let dxi = g.dxi();
    let ny = g.nyquist_index();
    let mut sums = alloc::vec![Complex64::new(0.0, 0.0); g.modes()];
    if t > 0.0 {
        for (ka, va) in sup.modes.iter().zip(&sup.values) {
            for (kb, vb) in sup.modes.iter().zip(&sup.values) {
                let Some(j) = g.index_of(ka + kb) else { continue };
                let xi = g.xi(j);
                if j == ny || !in_window(xi, window) {
                    continue;
                }
                sums[j] += va * vb * phi1(kernel.sigma(xi, *kb as f64 * dxi), t);
            }
        }
    }
    let pre = -0.5 * dxi / libm::sqrt(2.0 * PI);
    for (j, v) in sums.iter_mut().enumerate() {
        let xi = g.xi(j);
        *v *= Complex64::new(0.0, pre * xi) * params.propagator(xi, t);
    }
    Ok(PicardTerm { order: 2, t, field: SpectralField::from_coeffs(g, sums)?, data: None })
}

/// Third Picard term `u₃(t)` on `|ξ| ∈ window`.
pub fn third_term(
    phi: &SpectralField,
    t: f64,
    params: &EquationParams,
    window: (f64, f64),
) -> Result<PicardTerm> {
    check_time(t)?;
    let g = phi.grid();
    check_window(g, Some(window))?;
    let kernel = ResonanceKernel::new(*params);
    let sup = support(phi);
    let dxi = g.dxi();
    let ny = g.nyquist_index();
    let coeff = |k: i64| g.index_of(k).map(|j| phi.coeffs()[j]).unwrap_or_default();
    let mut out = alloc::vec![Complex64::new(0.0, 0.0); g.modes()];
    if t > 0.0 {
        for (j, slot) in out.iter_mut().enumerate() {
            let xi = g.xi(j);
            if j == ny || !in_window(xi, Some(window)) {
                continue;
            }
            let k = g.mode(j);
            let mut acc = Complex64::new(0.0, 0.0);
            for (ka, va) in sup.modes.iter().zip(&sup.values) {
                for (kc, vc) in sup.modes.iter().zip(&sup.values) {
                    let vb = coeff(k - kc - ka);
                    if vb.norm() == 0.0 {
                        continue;
                    }
                    let xi1 = *ka as f64 * dxi;
                    let xi2 = (k - kc) as f64 * dxi;
                    acc += va * vb * vc * (xi2 * kernel.bracket(xi, xi1, xi2, t));
                }
            }
            *slot = acc * (-0.5 * xi * dxi * dxi / (2.0 * PI)) * params.propagator(xi, t);
        }
    }
    Ok(PicardTerm { order: 3, t, field: SpectralField::from_coeffs(g, out)?, data: None })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthOptions {
    /// Grid spacings across one band `I_N`.
    pub points_per_band: usize,
    pub slope_tolerance: f64,
    /// Number of kernel samples for the resonance-size checks.
    pub kernel_samples: usize,
    pub seed: u64,
}

impl Default for GrowthOptions {
    fn default() -> Self {
        GrowthOptions { points_per_band: 64, slope_tolerance: 0.15, kernel_samples: 200, seed: 0 }
    }
}

/// One `N` of a growth sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthEntry {
    pub data: IllposedData,
    pub t_n: f64,
    pub datum_norm: f64,
    pub norm: f64,
    /// Range of the resonance ratio checked for this `N`.
    pub ratio_min: f64,
    pub ratio_max: f64,
    /// Largest `||bracket| - t²/2| / ((β+η) t³ N²)` over the sampled triples.
    pub kernel_defect: f64,
    /// `min e^{η(|ξ|-ξ²)t_N}` over the output window (second-order runs).
    pub damping_min: f64,
}

/// `|u₃(t_N)|_{H^s}` on `[N+3γ, N+4γ]` for the `γ = εN` datum, plus the
/// resonance-size and kernel checks on sampled triples.
pub fn c3_entry(s: f64, epsilon: f64, n: f64, params: &EquationParams, opts: &GrowthOptions) -> Result<GrowthEntry> {
    let d = IllposedData::c3(n, epsilon, s)?;
    let (lo, hi) = (n + 3.0 * d.gamma, n + 4.0 * d.gamma);
    let grid = d.grid(opts.points_per_band, hi)?;
    let phi = build_illposed_datum(&d, &grid)?;
    let t = d.t_n();
    let term = third_term(&phi, t, params, (lo, hi))?;
    let kernel = ResonanceKernel::new(*params);
    let scale = (params.beta + params.eta) * n * n;
    let (mut rmin, mut rmax, mut defect) = (f64::INFINITY, 0.0f64, 0.0f64);
    for (xi, xi1, xi2) in ResonanceKernel::sample_region(&d, opts.kernel_samples, opts.seed) {
        let r = kernel.sigma(xi2, xi1).norm() / scale;
        rmin = rmin.min(r);
        rmax = rmax.max(r);
        let k = kernel.bracket(xi, xi1, xi2, t);
        defect = defect.max((k.norm() - 0.5 * t * t).abs() / (t * t * t * scale));
    }
    Ok(GrowthEntry {
        data: d,
        t_n: t,
        datum_norm: sobolev_norm(&phi, s),
        norm: term.window_norm(s, lo, hi),
        ratio_min: rmin,
        ratio_max: rmax,
        kernel_defect: defect,
        damping_min: f64::NAN,
    })
}

/// `|u₂(t_N)|_{H^s}` on `[2N, 2N+4γ]` for the `γ = N^{1-ε}` datum of the
/// non-dispersive equation (`β = 0`).
pub fn c2_nd_entry(s: f64, epsilon: f64, n: f64, eta: f64, opts: &GrowthOptions) -> Result<GrowthEntry> {
    let params = EquationParams::new(0.0, eta, true)?;
    if eta == 0.0 {
        return Err(Error::param("eta", "must be positive"));
    }
    let d = IllposedData::c2(n, epsilon, s)?;
    let (lo, hi) = (2.0 * n, 2.0 * n + 4.0 * d.gamma);
    let grid = d.grid(opts.points_per_band, hi)?;
    let phi = build_illposed_datum(&d, &grid)?;
    let t = d.t_n();
    let term = second_term(&phi, t, &params, Some((lo, hi)))?;
    let kernel = ResonanceKernel::new(params);
    let (blo, bhi) = d.band();
    let mut r = rng(opts.seed);
    let (mut rmin, mut rmax) = (f64::INFINITY, 0.0f64);
    let mut taken = 0;
    while taken < opts.kernel_samples {
        let xi = lo + (hi - lo) * r.gen::<f64>();
        let xi1 = blo + (bhi - blo) * r.gen::<f64>();
        if xi - xi1 < blo || xi - xi1 > bhi {
            continue;
        }
        let ratio = kernel.lambda_nd(xi, xi1) / (eta * n * n);
        rmin = rmin.min(ratio);
        rmax = rmax.max(ratio);
        taken += 1;
    }
    let damping_min = grid
        .frequencies()
        .into_iter()
        .filter(|xi| in_window(*xi, Some((lo, hi))))
        .map(|xi| libm::exp(-params.p(xi) * t))
        .fold(f64::INFINITY, f64::min);
    Ok(GrowthEntry {
        data: d,
        t_n: t,
        datum_norm: sobolev_norm(&phi, s),
        norm: term.window_norm(s, lo, hi),
        ratio_min: rmin,
        ratio_max: rmax,
        kernel_defect: f64::NAN,
        damping_min,
    })
}

fn check_n_list(n_list: &[f64]) -> Result<()> {
    if n_list.len() < 4 {
        return Err(Error::param("N_list", "need at least four values"));
    }
    if n_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::param("N_list", "must be increasing"));
    }
    Ok(())
}

/// Fits the growth slope and assembles the report. Rows are
/// `(N, gamma, t_N, norm, target_exponent, fitted_slope)`.
pub fn growth_report(name: &str, entries: &[GrowthEntry], target: f64, tolerance: f64) -> Result<ExperimentReport> {
    let ns: Vec<f64> = entries.iter().map(|e| e.data.n).collect();
    let norms: Vec<f64> = entries.iter().map(|e| e.norm).collect();
    let fit = fit_loglog(&ns, &norms)?;
    let mut report =
        ExperimentReport::new(name, &["N", "gamma", "t_N", "norm", "target_exponent", "fitted_slope"]);
    for e in entries {
        report.push_row(alloc::vec![e.data.n, e.data.gamma, e.t_n, e.norm, target, fit.slope]);
    }
    report.push_check(Check::within("slope", fit.slope, target, tolerance));
    if entries.len() >= 4 {
        let trimmed = fit_loglog(&ns[2..], &norms[2..])?;
        report.push_metric("slope_without_two_smallest", trimmed.slope);
    }
    let dmin = entries.iter().map(|e| e.datum_norm).fold(f64::INFINITY, f64::min);
    let dmax = entries.iter().map(|e| e.datum_norm).fold(0.0, f64::max);
    report.push_metric("datum_norm_min", dmin);
    report.push_metric("datum_norm_max", dmax);
    report.push_check(Check::at_least("datum_norm_min", dmin, 0.5));
    report.push_check(Check::at_most("datum_norm_max", dmax, 4.0));
    Ok(report)
}

/// Growth of `|u₃(t_N)|_{H^s}` in `N`; target slope `-2s-1-2ε`.
pub fn illposed_growth_c3(
    s: f64,
    epsilon: f64,
    n_list: &[f64],
    params: &EquationParams,
    opts: &GrowthOptions,
) -> Result<ExperimentReport> {
    check_n_list(n_list)?;
    let entries = n_list
        .iter()
        .map(|&n| c3_entry(s, epsilon, n, params, opts))
        .collect::<Result<Vec<_>>>()?;
    c3_report(s, epsilon, &entries, opts)
}

pub fn c3_report(s: f64, epsilon: f64, entries: &[GrowthEntry], opts: &GrowthOptions) -> Result<ExperimentReport> {
    let target = -2.0 * s - 1.0 - 2.0 * epsilon;
    let mut report = growth_report("illposed-c3", entries, target, opts.slope_tolerance)?;
    let rmin = entries.iter().map(|e| e.ratio_min).fold(f64::INFINITY, f64::min);
    let rmax = entries.iter().map(|e| e.ratio_max).fold(0.0, f64::max);
    let defect = entries.iter().map(|e| e.kernel_defect).fold(0.0, f64::max);
    report.push_metric("resonance_ratio_min", rmin);
    report.push_metric("resonance_ratio_max", rmax);
    report.push_metric("kernel_defect", defect);
    // |σ(ξ₂,ξ₁)| ∼ (β+η)N² and bracket = t²/2 + O((β+η) t³ N²) on the sampled region.
    report.push_check(Check::at_least("resonance_ratio_min", rmin, 0.1));
    report.push_check(Check::at_most("resonance_ratio_max", rmax, 4.0));
    report.push_check(Check::at_most("kernel_defect", defect, 1.0));
    Ok(report)
}

/// Growth of `|u₂(t_N)|_{H^s}` in `N` for `β = 0`; target slope
/// `(-2s-1-3ε)/2`.
pub fn illposed_growth_c2_nd(
    s: f64,
    epsilon: f64,
    n_list: &[f64],
    eta: f64,
    opts: &GrowthOptions,
) -> Result<ExperimentReport> {
    check_n_list(n_list)?;
    let entries = n_list
        .iter()
        .map(|&n| c2_nd_entry(s, epsilon, n, eta, opts))
        .collect::<Result<Vec<_>>>()?;
    c2_nd_report(s, epsilon, &entries, eta, opts)
}

pub fn c2_nd_report(
    s: f64,
    epsilon: f64,
    entries: &[GrowthEntry],
    eta: f64,
    opts: &GrowthOptions,
) -> Result<ExperimentReport> {
    let target = (-2.0 * s - 1.0 - 3.0 * epsilon) / 2.0;
    let mut report = growth_report("illposed-c2nd", entries, target, opts.slope_tolerance)?;
    let rmin = entries.iter().map(|e| e.ratio_min).fold(f64::INFINITY, f64::min);
    let rmax = entries.iter().map(|e| e.ratio_max).fold(0.0, f64::max);
    let damping = entries.iter().map(|e| e.damping_min).fold(f64::INFINITY, f64::min);
    report.push_metric("lambda_ratio_min", rmin);
    report.push_metric("lambda_ratio_max", rmax);
    report.push_metric("damping_min", damping);
    // λ = 2ηξ₁(ξ-ξ₁) + η(|ξ| - |ξ₁| - |ξ-ξ₁|) ∈ [2ηN², 2η(N+2γ)²] on the window.
    report.push_check(Check::at_least("lambda_ratio_min", rmin, 1.0));
    report.push_check(Check::at_most("lambda_ratio_max", rmax, 18.0));
    // (|ξ|² - |ξ|) t_N ≤ (2 + 4γ/N)² N^{-ε} ≤ 36 for γ ≤ N.
    report.push_check(Check::at_least("damping_min", damping, libm::exp(-36.0 * eta)));
    Ok(report)
}

//! Sobolev, weighted and time-weighted norms, and the closed-form
//! smoothing envelopes `f_λ` and `g_{s,η}`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::grid::SpectralField;

/// Boundary region for the weighted-norm guard is `|x| > 0.9 L`.
pub const BOUNDARY_BAND: f64 = 0.9;
/// Weighted norms are flagged once the boundary region carries this share.
pub const BOUNDARY_THRESHOLD: f64 = 0.01;

/// Regularity index `s` and spatial weight order `r` of `F_{s,r} = H^s ∩ L²_r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormSpec {
    pub s: f64,
    pub r: u32,
}

impl NormSpec {
    pub fn new(s: f64, r: u32) -> Result<Self> {
        if !s.is_finite() {
            return Err(Error::param("s", "must be finite"));
        }
        if r > 3 {
            return Err(Error::param("r", "weight order must be 0, 1, 2 or 3"));
        }
        Ok(NormSpec { s, r })
    }

    /// `‖f‖_{F_{s,r}} = (‖f‖²_{H^s} + ‖f‖²_{L²_r})^{1/2}` and the weighted
    /// norm's boundary share.
    pub fn norm(&self, f: &SpectralField) -> WeightedNorm {
        let w = weighted_l2_norm(f, self.r);
        let hs = sobolev_norm(f, self.s);
        WeightedNorm {
            value: libm::sqrt(hs * hs + w.value * w.value),
            boundary_fraction: w.boundary_fraction,
        }
    }
}

/// `(Σ ⟨ξ_k⟩^{2s} |û(ξ_k)|² Δξ)^{1/2}`.
pub fn sobolev_norm(f: &SpectralField, s: f64) -> f64 {
    let g = f.grid();
    let sum: f64 = f
        .coeffs()
        .iter()
        .enumerate()
        .map(|(j, c)| {
            let xi = g.xi(j);
            libm::pow(1.0 + xi * xi, s) * c.norm_sqr()
        })
        .sum();
    libm::sqrt(sum * g.dxi())
}

/// Sobolev norm restricted to frequencies in `[lo, hi]` (both signs when
/// `symmetric`).
pub fn sobolev_norm_window(f: &SpectralField, s: f64, lo: f64, hi: f64, symmetric: bool) -> f64 {
    let g = f.grid();
    let sum: f64 = f
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(j, _)| {
            let xi = g.xi(*j);
            let a = if symmetric { libm::fabs(xi) } else { xi };
            a >= lo && a <= hi
        })
        .map(|(j, c)| {
            let xi = g.xi(j);
            libm::pow(1.0 + xi * xi, s) * c.norm_sqr()
        })
        .sum();
    libm::sqrt(sum * g.dxi())
}

/// Value of a physical-space weighted norm plus the share of the integral
/// coming from `|x| > 0.9 L`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedNorm {
    pub value: f64,
    pub boundary_fraction: f64,
}

impl WeightedNorm {
    /// Whether truncation to the box is still faithful.
    pub fn is_faithful(&self) -> bool {
        self.boundary_fraction <= BOUNDARY_THRESHOLD
    }

    pub fn checked(self) -> Result<f64> {
        if self.is_faithful() {
            Ok(self.value)
        } else {
            Err(Error::BoundaryMass { fraction: self.boundary_fraction, threshold: BOUNDARY_THRESHOLD })
        }
    }
}

/// `(∫ w(x) |f(x)|² dx)^{1/2}` by the rectangle rule on the grid.
pub fn weighted_norm_with(f: &SpectralField, weight: impl Fn(f64) -> f64) -> WeightedNorm {
    let g = f.grid();
    let dx = g.dx();
    let edge = BOUNDARY_BAND * g.half_length();
    let (mut total, mut boundary) = (0.0, 0.0);
    for (j, v) in f.to_complex_samples().iter().enumerate() {
        let x = g.x(j);
        let c = weight(x) * v.norm_sqr() * dx;
        total += c;
        if libm::fabs(x) > edge {
            boundary += c;
        }
    }
    WeightedNorm {
        value: libm::sqrt(total),
        boundary_fraction: if total > 0.0 { boundary / total } else { 0.0 },
    }
}

/// `‖f‖_{L²_r} = (∫ (1+x²)^r |f|² dx)^{1/2}` over the truncated domain.
pub fn weighted_l2_norm(f: &SpectralField, r: u32) -> WeightedNorm {
    weighted_norm_with(f, |x| libm::pow(1.0 + x * x, r as f64))
}

/// `‖x^j f‖_{L²}`.
pub fn moment_norm(f: &SpectralField, j: u32) -> WeightedNorm {
    weighted_norm_with(f, |x| libm::pow(x * x, j as f64))
}

/// Samples of `‖u(t)‖_{H^s}` and `‖u(t)‖_{L²}` for the `X_T^s` norm.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeWeightedTrace {
    pub times: Vec<f64>,
    pub hs_values: Vec<f64>,
    pub l2_values: Vec<f64>,
    pub s: f64,
}

impl TimeWeightedTrace {
    pub fn new(times: Vec<f64>, hs_values: Vec<f64>, l2_values: Vec<f64>, s: f64) -> Result<Self> {
        if times.len() != hs_values.len() || times.len() != l2_values.len() {
            return Err(Error::param("trace", "arrays must have equal length"));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) || times.first().is_some_and(|&t| t < 0.0) {
            return Err(Error::param("times", "must be increasing and non-negative"));
        }
        if hs_values.iter().chain(&l2_values).any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::param("trace", "norm values must be finite and non-negative"));
        }
        Ok(TimeWeightedTrace { times, hs_values, l2_values, s })
    }

    /// Trace of the given states at the given times.
    pub fn from_states<'a>(
        times: &[f64],
        states: impl IntoIterator<Item = &'a SpectralField>,
        s: f64,
    ) -> Result<Self> {
        let (hs, l2): (Vec<f64>, Vec<f64>) =
            states.into_iter().map(|u| (sobolev_norm(u, s), u.l2_norm())).unzip();
        Self::new(times.to_vec(), hs, l2, s)
    }
}

/// `sup_{t∈(0,T]} ‖u(t)‖_{H^s} + t^{|s|/2} ‖u(t)‖_{L²}` over the samples.
pub fn xts_norm(trace: &TimeWeightedTrace) -> Result<f64> {
    if trace.times.is_empty() {
        return Err(Error::Empty("trace"));
    }
    if trace.s >= 0.0 {
        return Err(Error::param("s", "X_T^s is defined for s < 0"));
    }
    let e = libm::fabs(trace.s) / 2.0;
    Ok(trace
        .times
        .iter()
        .zip(trace.hs_values.iter().zip(&trace.l2_values))
        .map(|(t, (hs, l2))| hs + libm::pow(*t, e) * l2)
        .fold(0.0, f64::max))
}

/// Modified norm `sup_t ‖u‖_{X^{s'}}-terms + t^{|s|/2} ‖(1-∂²)^{(s'-s)/2} u‖_{L²}`
/// where `lifted[i]` is the last factor's `L²` norm at `times[i]`.
pub fn xts_tilde_norm(trace: &TimeWeightedTrace, base_s: f64, lifted: &[f64]) -> Result<f64> {
    if lifted.len() != trace.times.len() {
        return Err(Error::param("lifted", "length must match the trace"));
    }
    let base = xts_norm(trace)?;
    let e = libm::fabs(base_s) / 2.0;
    let extra = trace
        .times
        .iter()
        .zip(lifted)
        .map(|(t, v)| libm::pow(*t, e) * v)
        .fold(0.0, f64::max);
    Ok(base + extra)
}

/// `f_λ(t) = (t^λ + η^{-λ}) exp{(η/8)(t + t^{1/2}(t + 16λ/η)^{1/2})}`.
pub fn f_lambda(t: f64, lambda: f64, eta: f64) -> f64 {
    (libm::pow(t, lambda) + libm::pow(eta, -lambda))
        * libm::exp(eta / 8.0 * (t + libm::sqrt(t) * libm::sqrt(t + 16.0 * lambda / eta)))
}

/// `g_{s,η}(t) = e^{ηt/4} + (t^{|s|/2} + η^{-|s|/2}) exp{(η/8)(t + t^{1/2}(t + 8|s|/η)^{1/2})}`.
pub fn g_s_eta(t: f64, s: f64, eta: f64) -> f64 {
    let a = libm::fabs(s);
    libm::exp(eta * t / 4.0)
        + (libm::pow(t, a / 2.0) + libm::pow(eta, -a / 2.0))
            * libm::exp(eta / 8.0 * (t + libm::sqrt(t) * libm::sqrt(t + 8.0 * a / eta)))
}

/// Point `ξ ≥ 0` where `|tξ²|^λ e^{η(|ξ|-ξ²)t}` peaks:
/// `ξ* = x₁ / √t` with `x₁ = (√t + √(t + 16λ/η))/4`.
pub fn smoothing_peak(t: f64, lambda: f64, eta: f64) -> f64 {
    let x1 = 0.25 * (libm::sqrt(t) + libm::sqrt(t + 16.0 * lambda / eta));
    x1 / libm::sqrt(t)
}

/// `|tξ²|^λ e^{η(|ξ|-ξ²)t}`.
pub fn smoothing_multiplier(xi: f64, t: f64, lambda: f64, eta: f64) -> f64 {
    let a = libm::fabs(xi);
    libm::pow(t * xi * xi, lambda) * libm::exp(eta * (a - xi * xi) * t)
}

/// Brute-force maximum of [`smoothing_multiplier`] over `n` uniform points
/// of `[-xi_max, xi_max]`.
pub fn smoothing_multiplier_sup(t: f64, lambda: f64, eta: f64, xi_max: f64, n: usize) -> f64 {
    (0..n)
        .map(|i| -xi_max + 2.0 * xi_max * i as f64 / (n - 1) as f64)
        .map(|xi| smoothing_multiplier(xi, t, lambda, eta))
        .fold(0.0, f64::max)
}

/// Constant for an inequality `lhs ≤ C · rhs` fitted on a calibration set
/// and then held fixed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FittedConstant {
    pub value: f64,
}

impl FittedConstant {
    /// Largest `lhs/rhs` over the calibration pairs.
    pub fn calibrate(pairs: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        let mut seen = false;
        let mut value: f64 = 0.0;
        for (lhs, rhs) in pairs {
            seen = true;
            if rhs <= 0.0 {
                return Err(Error::param("rhs", "calibration bound must be positive"));
            }
            value = value.max(lhs / rhs);
        }
        if !seen {
            return Err(Error::Empty("calibration set"));
        }
        Ok(FittedConstant { value })
    }

    /// Pairs violating `lhs ≤ C · rhs · (1 + slack)`.
    pub fn violations(&self, pairs: impl IntoIterator<Item = (f64, f64)>, slack: f64) -> usize {
        pairs
            .into_iter()
            .filter(|(lhs, rhs)| *lhs > self.value * rhs * (1.0 + slack))
            .count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use core::f64::consts::PI;

    #[test]
    fn zero_field_has_zero_norms() {
        let g = Grid::new(10.0, 64).unwrap();
        let z = SpectralField::zeros(&g);
        assert_eq!(sobolev_norm(&z, 1.5), 0.0);
        for r in 0..4 {
            assert_eq!(weighted_l2_norm(&z, r).value, 0.0);
        }
    }

    #[test]
    fn single_mode_unit_coefficient() {
        let g = Grid::new(PI, 16).unwrap();
        let mut f = SpectralField::zeros(&g);
        f.coeffs_mut()[1] = num_complex::Complex64::new(1.0, 0.0);
        // ⟨1⟩² = 2, Δξ = 1 on this grid
        assert!((sobolev_norm(&f, 1.0) - libm::sqrt(2.0)).abs() < 1e-15);
    }

    #[test]
    fn plancherel_and_homogeneity() {
        let g = Grid::new(12.0, 128).unwrap();
        let f = SpectralField::from_fn(&g, |x| libm::exp(-x * x) * (1.0 + libm::sin(3.0 * x)));
        let phys = f.physical_l2_norm();
        assert!((sobolev_norm(&f, 0.0) - phys).abs() < 1e-12 * phys);
        assert!((weighted_l2_norm(&f, 0).value - phys).abs() < 1e-10 * phys);
        let f3 = f.scaled(-3.0);
        assert!((sobolev_norm(&f3, 0.7) - 3.0 * sobolev_norm(&f, 0.7)).abs() < 1e-12);
        assert!((weighted_l2_norm(&f3, 2).value - 3.0 * weighted_l2_norm(&f, 2).value).abs() < 1e-12);
    }

    #[test]
    fn boundary_guard_trips_on_wide_data() {
        let g = Grid::new(10.0, 128).unwrap();
        let wide = SpectralField::from_fn(&g, |_| 1.0);
        assert!(!weighted_l2_norm(&wide, 1).is_faithful());
        assert!(weighted_l2_norm(&wide, 1).checked().is_err());
        let narrow = SpectralField::from_fn(&g, |x| libm::exp(-x * x));
        assert!(weighted_l2_norm(&narrow, 3).is_faithful());
    }

    #[test]
    fn norm_spec_rejects_large_weights() {
        assert!(NormSpec::new(2.0, 4).is_err());
        let spec = NormSpec::new(2.0, 1).unwrap();
        let g = Grid::new(10.0, 128).unwrap();
        let f = SpectralField::from_fn(&g, |x| libm::exp(-x * x));
        let h = sobolev_norm(&f, 2.0);
        let w = weighted_l2_norm(&f, 1).value;
        assert!((spec.norm(&f).value - libm::sqrt(h * h + w * w)).abs() < 1e-14);
    }

    #[test]
    fn xts_of_constant_trace_peaks_at_final_time() {
        let times: Vec<f64> = (1..=10).map(|i| i as f64 / 10.0).collect();
        let tr = TimeWeightedTrace::new(times.clone(), alloc::vec![2.0; 10], alloc::vec![3.0; 10], -0.25).unwrap();
        assert!((xts_norm(&tr).unwrap() - 5.0).abs() < 1e-15);
        let zero = TimeWeightedTrace::new(times, alloc::vec![0.0; 10], alloc::vec![0.0; 10], -0.25).unwrap();
        assert_eq!(xts_norm(&zero).unwrap(), 0.0);
        let empty = TimeWeightedTrace::new(alloc::vec![], alloc::vec![], alloc::vec![], -0.25).unwrap();
        assert_eq!(xts_norm(&empty), Err(Error::Empty("trace")));
        let tilde = xts_tilde_norm(&tr, -0.25, &[1.0; 10]).unwrap();
        assert!((tilde - 6.0).abs() < 1e-15);
    }

    #[test]
    fn f_lambda_reference_value() {
        let expected = 2.0 * libm::exp((1.0 + libm::sqrt(17.0)) / 8.0);
        assert!((f_lambda(1.0, 1.0, 1.0) - expected).abs() < 1e-14);
        assert!((expected - 3.7944).abs() < 1e-4);
    }

    #[test]
    fn envelopes_are_nondecreasing() {
        for &(lambda, eta) in &[(0.5, 0.5), (1.0, 1.0), (2.0, 2.0)] {
            let mut prev = 0.0;
            for i in 0..200 {
                let t = libm::pow(10.0, -4.0 + 5.0 * i as f64 / 199.0);
                let v = f_lambda(t, lambda, eta);
                assert!(v >= prev);
                prev = v;
            }
        }
        for &(s, eta) in &[(-0.4, 1.0), (-0.1, 0.5), (-0.49, 2.0)] {
            let mut prev = 0.0;
            for i in 1..=100 {
                let v = g_s_eta(i as f64 / 100.0, s, eta);
                assert!(v >= prev);
                prev = v;
            }
            let limit = 1.0 + libm::pow(eta, -libm::fabs(s) / 2.0);
            let t: f64 = 1e-14;
            let lead = libm::pow(t, libm::fabs(s) / 2.0);
            assert!((g_s_eta(t, s, eta) - limit - lead).abs() < 1e-5);
        }
    }

    #[test]
    fn fitted_constant_round_trip() {
        let c = FittedConstant::calibrate([(1.0, 2.0), (3.0, 2.0)]).unwrap();
        assert_eq!(c.value, 1.5);
        assert_eq!(c.violations([(1.0, 1.0), (2.0, 1.0)], 0.0), 1);
        assert!(FittedConstant::calibrate(core::iter::empty()).is_err());
    }
}

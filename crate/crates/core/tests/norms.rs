use chenlee_core::fields::{gaussian, normalized, rough_band_limited};
use chenlee_core::norms::{
    f_lambda, g_s_eta, smoothing_multiplier, smoothing_multiplier_sup, smoothing_peak, sobolev_norm, weighted_l2_norm,
    xts_norm, FittedConstant, TimeWeightedTrace,
};
use chenlee_core::spectral::semigroup_apply;
use chenlee_core::{EquationParams, Grid, SpectralField};
use proptest::prelude::*;

/// Adaptive Simpson on `[a, b]`.
fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
        let m = 0.5 * (a + b);
        (b - a) / 6.0 * (f(a) + 4.0 * f(m) + f(b))
    }
    fn recurse(f: &dyn Fn(f64) -> f64, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (l, r) = (simpson(f, a, m), simpson(f, m, b));
        if depth == 0 || (l + r - whole).abs() <= 15.0 * tol {
            return l + r + (l + r - whole) / 15.0;
        }
        recurse(f, a, m, l, 0.5 * tol, depth - 1) + recurse(f, m, b, r, 0.5 * tol, depth - 1)
    }
    recurse(f, a, b, simpson(f, a, b), tol, 40)
}

#[test]
fn weighted_gaussian_norm_matches_adaptive_quadrature() {
    let g = Grid::new(20.0, 1024).unwrap();
    let u = gaussian(&g, 1.0, 1.0);
    let oracle = adaptive_simpson(&|x: f64| (1.0 + x * x) * (-2.0 * x * x).exp(), -20.0, 20.0, 1e-14);
    assert!((oracle - 1.25 * (std::f64::consts::PI / 2.0).sqrt()).abs() < 1e-12);
    let got = weighted_l2_norm(&u, 1);
    assert!(got.is_faithful());
    assert!((got.value * got.value - oracle).abs() < 1e-8 * oracle);
}

#[test]
fn unweighted_norm_is_plancherel() {
    let g = Grid::new(20.0, 512).unwrap();
    let u = gaussian(&g, 0.7, 2.0);
    let a = weighted_l2_norm(&u, 0).value;
    let b = sobolev_norm(&u, 0.0);
    assert!((a - b).abs() < 1e-10 * b);
}

#[test]
fn f_lambda_at_one() {
    let expected = 2.0 * ((1.0 + 17f64.sqrt()) / 8.0).exp();
    assert!((f_lambda(1.0, 1.0, 1.0) - expected).abs() < 1e-12);
    assert!((expected - 3.7944).abs() < 1e-4);
}

#[test]
fn smoothing_multiplier_peaks_where_predicted() {
    for (t, lambda, eta) in [(0.01, 0.5, 1.0), (0.3, 2.0, 0.5), (1.0, 1.0, 2.0)] {
        let xs = smoothing_peak(t, lambda, eta);
        let v = smoothing_multiplier(xs, t, lambda, eta);
        let h = 1e-4 * xs;
        assert!(v >= smoothing_multiplier(xs - h, t, lambda, eta));
        assert!(v >= smoothing_multiplier(xs + h, t, lambda, eta));
    }
}

#[test]
fn one_constant_bounds_the_smoothing_multiplier() {
    let mut pairs = Vec::new();
    for i in 0..=30 {
        let t = 10f64.powf(-3.0 + 3.0 * i as f64 / 30.0);
        for lambda in [0.5, 1.0, 2.0] {
            for eta in [0.5, 1.0, 2.0] {
                let sup = smoothing_multiplier_sup(t, lambda, eta, 200.0, 400_001);
                pairs.push((sup, f_lambda(t, lambda, eta)));
            }
        }
    }
    let c = FittedConstant::calibrate(pairs.iter().copied()).unwrap();
    assert!(c.value <= 10.0, "C = {}", c.value);
    assert_eq!(c.violations(pairs, 0.0), 0);
}

#[test]
fn g_envelope_bounds_the_weighted_semigroup_trace() {
    let g = Grid::new(8.0, 1024).unwrap();
    let s = -0.4;
    let params = EquationParams::new(1.0, 1.0, false).unwrap();
    let times: Vec<f64> = (0..=20).map(|i| 10f64.powf(-3.0 + 3.0 * i as f64 / 20.0)).collect();
    let pairs_for = |seed: u64| -> Vec<(f64, f64)> {
        let phi = normalized(&rough_band_limited(&g, seed, 0.5, 150.0, 0.2), s, 1.0);
        times
            .iter()
            .map(|&t| {
                let u = semigroup_apply(&phi, t, &params).unwrap();
                (t.powf(0.2) * u.l2_norm(), g_s_eta(t, s, 1.0))
            })
            .collect()
    };
    let calibration: Vec<(f64, f64)> = (0..8).flat_map(pairs_for).collect();
    let c = FittedConstant::calibrate(calibration).unwrap();
    assert!(c.value.is_finite() && c.value > 0.0);
    let test: Vec<(f64, f64)> = (100..116).flat_map(pairs_for).collect();
    assert_eq!(c.violations(test, 0.1), 0, "C = {}", c.value);
}

#[test]
fn xts_of_zero_trace_is_zero() {
    let tr = TimeWeightedTrace::new(vec![0.5, 1.0], vec![0.0; 2], vec![0.0; 2], -0.3).unwrap();
    assert_eq!(xts_norm(&tr).unwrap(), 0.0);
}

#[test]
fn xts_of_heat_dominated_trace_is_controlled_by_g() {
    let g = Grid::new(8.0, 512).unwrap();
    let s = -0.25;
    let params = EquationParams::new(0.0, 1.0, false).unwrap();
    let phi = normalized(&rough_band_limited(&g, 5, 0.5, 80.0, 0.3), s, 1.0);
    let times: Vec<f64> = (1..=40).map(|i| i as f64 / 40.0).collect();
    let states: Vec<SpectralField> = times.iter().map(|&t| semigroup_apply(&phi, t, &params).unwrap()).collect();
    let tr = TimeWeightedTrace::from_states(&times, &states, s).unwrap();
    let x = xts_norm(&tr).unwrap();
    assert!(x.is_finite());
    assert!(x <= 2.0 * g_s_eta(1.0, s, 1.0));
}

proptest! {
    #[test]
    fn f_lambda_is_nondecreasing(lambda in 0.1f64..3.0, eta in 0.1f64..3.0, t in 1e-4f64..1.0, dt in 0.0f64..0.5) {
        prop_assert!(f_lambda(t, lambda, eta) <= f_lambda(t + dt, lambda, eta));
    }

    #[test]
    fn g_is_nondecreasing(s in -2.0f64..0.0, eta in 0.1f64..3.0, t in 0.0f64..1.0, dt in 0.0f64..0.5) {
        prop_assert!(g_s_eta(t, s, eta) <= g_s_eta(t + dt, s, eta));
    }

    #[test]
    fn weighted_norms_are_homogeneous(a in 0.1f64..10.0, r in 0u32..3) {
        let g = Grid::new(20.0, 256).unwrap();
        let u = gaussian(&g, 1.0, 1.5);
        let base = weighted_l2_norm(&u, r).value;
        let scaled = weighted_l2_norm(&u.scaled(a), r).value;
        prop_assert!((scaled - a * base).abs() <= 1e-12 * a * base);
    }
}

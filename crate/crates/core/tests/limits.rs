use chenlee_core::fields::{gaussian, normalized, random_smooth};
use chenlee_core::limits::{
    beta_limit_sweep, blowup_time, calibrate_kato_constant, eta_limit_sweep, kato_quadratic_form, rho_bound,
    sweep_member, LimitKind, LimitSweepConfig,
};
use chenlee_core::norms::sobolev_norm;
use chenlee_core::solver::SolverConfig;
use chenlee_core::spectral::{symbol_p, symbol_q};
use chenlee_core::{Complex64, EquationParams, Error, Grid, SpectralField};

fn config(params: EquationParams, values: Vec<f64>, s: f64, phi: SpectralField) -> LimitSweepConfig {
    LimitSweepConfig {
        base_params: params,
        sweep_values: values,
        s,
        phi,
        solver: SolverConfig { dt: 1e-3, t_final: 1.0, save_every: 20, ..Default::default() },
        slope_tolerance: 0.15,
        monotone_slack: 0.05,
        kato_constant: 1.0,
    }
}

/// `sup_t ‖m(ξ,t) φ̂‖_{H^s}` over the sampled times.
fn closed_form_sup(phi: &SpectralField, s: f64, times: &[f64], m: impl Fn(f64, f64) -> Complex64) -> f64 {
    times
        .iter()
        .map(|&t| sobolev_norm(&phi.apply_multiplier(|xi| m(xi, t)), s))
        .fold(0.0, f64::max)
}

#[test]
fn linear_beta_errors_have_a_closed_form() {
    let g = Grid::new(16.0, 128).unwrap();
    let phi = gaussian(&g, 1.0, 1.0);
    let base = EquationParams::new(1.0, 1.0, false).unwrap();
    let cfg = config(base, vec![0.4, 0.2, 0.1, 0.05], 0.0, phi.clone());
    let r = beta_limit_sweep(&cfg).unwrap();
    let times = sweep_member(&cfg, LimitKind::Beta, 0.0).unwrap().times().to_vec();
    for (beta, e) in r.column("value").unwrap().iter().zip(r.column("sup_error").unwrap()) {
        let p = base.with_beta(*beta);
        let want = closed_form_sup(&phi, 0.0, &times, |xi, t| {
            (Complex64::new(0.0, symbol_q(xi, &p) * t).exp() - 1.0) * (-symbol_p(xi, &p) * t).exp()
        });
        assert!((e - want).abs() <= 1e-10 * want.max(1.0), "beta={beta} {e} {want}");
    }
}

#[test]
fn linear_eta_distances_have_a_closed_form() {
    let g = Grid::new(16.0, 128).unwrap();
    let phi = normalized(&gaussian(&g, 1.0, 1.0), 2.0, 0.5);
    let base = EquationParams::new(1.0, 1.0, false).unwrap();
    let mut cfg = config(base, vec![0.2, 0.1, 0.05, 0.025], 2.0, phi.clone());
    cfg.kato_constant = 0.1;
    let r = eta_limit_sweep(&cfg).unwrap();
    let times = sweep_member(&cfg, LimitKind::Eta, 0.0).unwrap().times().to_vec();
    for eta in [0.2, 0.1, 0.05, 0.025] {
        let p = base.with_eta(eta);
        let want = closed_form_sup(&phi, 0.0, &times, |xi, t| {
            ((-symbol_p(xi, &p) * t).exp() - 1.0) * Complex64::new(0.0, symbol_q(xi, &p) * t).exp()
        });
        let got = r.metric(&format!("limit_error_{eta}")).unwrap();
        assert!((got - want).abs() <= 1e-10 * want.max(1.0), "eta={eta} {got} {want}");
    }
}

#[test]
fn identical_members_coincide() {
    let g = Grid::new(16.0, 128).unwrap();
    let cfg = config(EquationParams::default(), vec![0.4, 0.2, 0.1, 0.05], 0.0, gaussian(&g, 1.0, 1.0));
    let a = sweep_member(&cfg, LimitKind::Beta, 0.0).unwrap();
    let b = sweep_member(&cfg, LimitKind::Beta, 0.0).unwrap();
    assert_eq!(a.sup_distance(&b, 0.0).unwrap(), 0.0);
}

#[test]
fn failing_member_aborts_the_sweep_with_progress() {
    let g = Grid::new(4.0, 512).unwrap();
    let mut cfg = config(EquationParams::default(), vec![4.0, 2.0, 1.0, 0.5], 0.0, gaussian(&g, 1.0, 0.5));
    // admissible only for β = 0
    cfg.solver.dt = 0.01;
    cfg.solver.t_final = 0.1;
    match beta_limit_sweep(&cfg) {
        Err(Error::SweepAborted { completed, cause }) => {
            assert_eq!(completed, 1);
            assert!(matches!(*cause, Error::Cfl { .. }));
        }
        other => panic!("expected an aborted sweep, got {other:?}"),
    }
}

#[test]
fn eta_horizon_must_precede_the_rho_blowup() {
    let g = Grid::new(16.0, 128).unwrap();
    let phi = normalized(&gaussian(&g, 1.0, 1.0), 2.0, 1.0);
    let mut cfg = config(EquationParams::default(), vec![0.2, 0.1, 0.05, 0.025], 2.0, phi);
    cfg.kato_constant = 10.0;
    assert!(blowup_time(1.0, 10.0) < 1.0);
    assert!(matches!(eta_limit_sweep(&cfg), Err(Error::InvalidParameter { name: "t_final", .. })));
    cfg.s = 1.0;
    assert!(matches!(eta_limit_sweep(&cfg), Err(Error::InvalidParameter { name: "s", .. })));
}

#[test]
fn rho_is_increasing_up_to_blowup() {
    for (norm, cs) in [(1.0, 2.0), (0.3, 0.5), (4.0, 0.1)] {
        let tp = blowup_time(norm, cs);
        assert_eq!(rho_bound(0.0, norm, cs).unwrap(), norm);
        let values: Vec<f64> = (0..50).map(|i| rho_bound(0.9 * tp * i as f64 / 49.0, norm, cs).unwrap()).collect();
        assert!(values.windows(2).all(|w| w[1] > w[0]));
        assert!(rho_bound(tp * (1.0 - 1e-9), norm, cs).unwrap() > 1e6 * norm);
        assert!(rho_bound(tp, norm, cs).is_err());
    }
}

#[test]
fn kato_ratio_of_a_single_mode_is_positive() {
    let g = Grid::new(16.0, 256).unwrap();
    let k = SpectralField::cosine_mode(&g, 5);
    let r = kato_quadratic_form(&k, 2.0).unwrap();
    assert!(r.is_finite() && r >= 0.0);
    let mixed = k.add(&SpectralField::cosine_mode(&g, 9).scaled(0.5)).unwrap();
    assert!(kato_quadratic_form(&mixed, 2.0).unwrap() > 0.0);
}

#[test]
fn frozen_kato_constant_covers_fresh_fields() {
    let g = Grid::new(16.0, 256).unwrap();
    let c = calibrate_kato_constant(&g, 2.0, 50, 0).unwrap();
    for seed in 1000..1050 {
        let r = kato_quadratic_form(&random_smooth(&g, seed, 0.5 + (seed % 5) as f64 * 0.5), 2.0).unwrap();
        assert!(r <= c, "seed {seed}: {r} > {c}");
    }
}

use chenlee_core::fields::{gaussian, random_phase};
use chenlee_core::flow::{second_term, third_term};
use chenlee_core::norms::sobolev_norm;
use chenlee_core::solver::{
    calibrate_bilinear_constant, continue_globally, contraction_time, default_probe_set, duhamel_integral,
    duhamel_with, solve, solve_picard, solve_stepper, DuhamelOptions, Method, SolverConfig,
    DEFAULT_CONTRACTION_CONSTANT,
};
use chenlee_core::spectral::{derivative, nonlinear_term, product, semigroup_apply, symbol_p};
use chenlee_core::{Complex64, EquationParams, Grid, SpectralField};

fn rel(a: &SpectralField, b: &SpectralField) -> f64 {
    a.sub(b).unwrap().l2_norm() / b.l2_norm()
}

fn two_mode(g: &Grid, k1: i64, k2: i64) -> SpectralField {
    SpectralField::cosine_mode(g, k1).add(&SpectralField::cosine_mode(g, k2)).unwrap()
}

#[test]
fn stepper_is_fourth_order() {
    let g = Grid::new(16.0, 64).unwrap();
    let phi = gaussian(&g, 2.0, 1.0);
    let p = EquationParams::default();
    let run = |dt: f64| {
        let cfg = SolverConfig { dt, t_final: 1.0, save_every: 1000, ..Default::default() };
        solve_stepper(&phi, &p, &cfg).unwrap().final_state().clone()
    };
    let dts = [0.04, 0.02, 0.01, 0.005];
    let states: Vec<SpectralField> = dts.iter().map(|&dt| run(dt)).collect();
    let e1 = states[0].sub(&states[1]).unwrap().l2_norm();
    let e2 = states[1].sub(&states[2]).unwrap().l2_norm();
    let e3 = states[2].sub(&states[3]).unwrap().l2_norm();
    for (a, b) in [(e1, e2), (e2, e3)] {
        let order = (a / b).log2();
        assert!((order - 4.0).abs() <= 0.2, "observed order {order} ({a:e}, {b:e})");
    }
}

#[test]
fn linear_runs_are_the_semigroup_at_every_sample() {
    let g = Grid::new(8.0, 128).unwrap();
    let phi = gaussian(&g, 1.0, 0.7);
    for beta in [0.0, 0.5, 1.0] {
        for eta in [0.0, 0.5, 1.0] {
            let p = EquationParams::new(beta, eta, false).unwrap();
            let cfg = SolverConfig { dt: 0.001, t_final: 1.0, save_every: 50, ..Default::default() };
            let tr = solve_stepper(&phi, &p, &cfg).unwrap();
            for (t, u) in tr.times().iter().zip(tr.states()) {
                let exact = semigroup_apply(&phi, *t, &p).unwrap();
                assert!(rel(u, &exact) <= 1e-12, "beta={beta} eta={eta} t={t}");
            }
        }
    }
}

#[test]
fn picard_agrees_with_the_stepper() {
    let g = Grid::new(16.0, 256).unwrap();
    let p = EquationParams::default();
    for amp in [1e-3, 1e-2, 0.1] {
        let phi = gaussian(&g, amp, 1.0);
        let t = contraction_time(sobolev_norm(&phi, 0.0), 0.0, p.eta, DEFAULT_CONTRACTION_CONSTANT).unwrap();
        let cfg = SolverConfig { t_final: t, dt: t / 400.0, save_every: 400, picard_tol: 1e-12, ..Default::default() };
        let pic = solve_picard(&phi, &p, &cfg).unwrap();
        assert!(pic.ratios.iter().all(|r| *r <= 0.5), "amp={amp} ratios {:?}", pic.ratios);
        assert!(pic.residual <= 1e-10);
        let st = solve_stepper(&phi, &p, &cfg).unwrap();
        let d = pic.trajectory.final_state().sub(st.final_state()).unwrap().l2_norm();
        assert!(d <= 1e-6, "amp={amp} distance {d:e}");
    }
}

#[test]
fn solve_dispatches_on_method() {
    let g = Grid::new(16.0, 128).unwrap();
    let phi = gaussian(&g, 1e-3, 1.0);
    let p = EquationParams::default();
    let cfg = SolverConfig { t_final: 0.01, dt: 1e-3, method: Method::Picard, ..Default::default() };
    let tr = solve(&phi, &p, &cfg).unwrap();
    assert_eq!(tr.len(), cfg.picard_nodes);
    let cfg = SolverConfig { method: Method::Stepper, save_every: 1, ..cfg };
    assert_eq!(solve(&phi, &p, &cfg).unwrap().len(), 11);
}

#[test]
fn frozen_contraction_constant_is_reproduced() {
    let p = EquationParams::default();
    let c = calibrate_bilinear_constant(&default_probe_set(), &p, 0.0, &[0.05, 0.1, 0.25, 0.5, 1.0]).unwrap();
    assert!((c - DEFAULT_CONTRACTION_CONSTANT).abs() < 1e-15, "recalibrated {c}");
}

#[test]
fn second_term_matches_time_quadrature() {
    let g = Grid::new(16.0, 128).unwrap();
    let phi = two_mode(&g, 3, 5);
    for p in [EquationParams::default(), EquationParams::new(0.0, 0.5, true).unwrap()] {
        let t = 0.3;
        let closed = second_term(&phi, t, &p, None).unwrap().field;
        let source = |tau: f64| Ok(nonlinear_term(&semigroup_apply(&phi, tau, &p)?));
        let quad = duhamel_with(source, t, &p, 8, &DuhamelOptions::default()).unwrap().scaled(-1.0);
        assert!(rel(&closed, &quad) < 1e-6, "{}", rel(&closed, &quad));
    }
}

#[test]
fn third_term_matches_time_quadrature() {
    let g = Grid::new(16.0, 128).unwrap();
    let phi = two_mode(&g, 2, 5);
    let p = EquationParams::default();
    let t = 0.2;
    let closed = third_term(&phi, t, &p, (0.0, g.max_xi())).unwrap().field;
    let source = |tau: f64| {
        let u1 = semigroup_apply(&phi, tau, &p)?;
        let u2 = second_term(&phi, tau, &p, None)?.field;
        Ok(derivative(&product(&u1, &u2)?, 1))
    };
    let quad = duhamel_with(source, t, &p, 8, &DuhamelOptions::default()).unwrap().scaled(-1.0);
    assert!(rel(&closed, &quad) < 1e-6, "{}", rel(&closed, &quad));
}

#[test]
fn duhamel_along_a_run_reproduces_the_mild_form() {
    let g = Grid::new(16.0, 256).unwrap();
    let p = EquationParams::default();
    let phi = gaussian(&g, 0.5, 1.0);
    let cfg = SolverConfig { dt: 1e-3, t_final: 0.5, save_every: 5, ..Default::default() };
    let tr = solve_stepper(&phi, &p, &cfg).unwrap();
    let integral = duhamel_integral(&tr, 0.5, &DuhamelOptions::default()).unwrap();
    let mild = semigroup_apply(&phi, 0.5, &p).unwrap().sub(&integral).unwrap();
    assert!(rel(&mild, tr.final_state()) < 1e-7, "{}", rel(&mild, tr.final_state()));
}

#[test]
fn duhamel_vanishes_for_linear_runs() {
    let g = Grid::new(8.0, 64).unwrap();
    let p = EquationParams::default().linear();
    let cfg = SolverConfig { dt: 0.005, t_final: 0.2, save_every: 1, ..Default::default() };
    let tr = solve_stepper(&gaussian(&g, 1.0, 1.0), &p, &cfg).unwrap();
    let d = duhamel_integral(&tr, 0.15, &DuhamelOptions::default()).unwrap();
    assert_eq!(d.l2_norm(), 0.0);
}

#[test]
fn restarted_linear_run_equals_one_continuous_run() {
    let g = Grid::new(8.0, 128).unwrap();
    let p = EquationParams::default().linear();
    let phi = gaussian(&g, 1.0, 1.0);
    let cfg = SolverConfig { dt: 0.001, t_final: 0.4, save_every: 40, ..Default::default() };
    let first = solve_stepper(&phi, &p, &cfg).unwrap();
    let long = continue_globally(&first, &cfg, 1.0).unwrap();
    assert!((long.end() - 1.0).abs() < 1e-12);
    let exact = semigroup_apply(&phi, long.end(), &p).unwrap();
    assert!(rel(long.final_state(), &exact) < 1e-12);
}

#[test]
fn nonlinear_restarts_are_self_consistent() {
    let g = Grid::new(16.0, 256).unwrap();
    let p = EquationParams::default();
    let phi = gaussian(&g, 1.0, 1.0);
    let cfg = SolverConfig { dt: 2e-3, t_final: 0.5, save_every: 10, ..Default::default() };
    let first = solve_stepper(&phi, &p, &cfg).unwrap();
    let long = continue_globally(&first, &cfg, 1.5).unwrap();
    let direct = solve_stepper(&phi, &p, &SolverConfig { t_final: 1.5, ..cfg }).unwrap();
    assert!(rel(long.final_state(), direct.final_state()) < 1e-8);
}

#[test]
fn energy_decays_when_the_spectrum_avoids_the_unit_band() {
    let g = Grid::new(4.0 * std::f64::consts::PI, 256).unwrap();
    let p = EquationParams::default();
    let phi = random_phase(&g, 7, |xi| if (1.0..=3.0).contains(&xi) { 0.05 } else { 0.0 });
    let cfg = SolverConfig { dt: 1e-3, t_final: 1.0, save_every: 1, ..Default::default() };
    let tr = solve_stepper(&phi, &p, &cfg).unwrap();
    let energy: Vec<f64> = tr.states().iter().map(|u| u.l2_norm().powi(2)).collect();
    assert!(energy.windows(2).all(|w| w[1] <= w[0]));
    // the quadratic form -2∫p|û|² is the rate of change
    let h = tr.times()[1] - tr.times()[0];
    for i in 1..energy.len() - 1 {
        let rate = (energy[i + 1] - energy[i - 1]) / (2.0 * h);
        let u = &tr.states()[i];
        let form: f64 =
            -2.0 * (0..g.modes()).map(|j| symbol_p(g.xi(j), &p) * u.coeffs()[j].norm_sqr()).sum::<f64>() * g.dxi();
        assert!(form <= 0.0);
        assert!((rate - form).abs() <= 1e-3 * form.abs(), "t={} {rate} {form}", tr.times()[i]);
    }
}

#[test]
fn half_frequency_mode_grows_at_the_predicted_rate() {
    // ξ = 0.5 is the mode k = 2 when L = 4π
    let g = Grid::new(4.0 * std::f64::consts::PI, 64).unwrap();
    assert!((g.xi(2) - 0.5).abs() < 1e-15);
    for (eta, nonlinear, amp) in [(1.0, false, 1.0), (2.0, false, 1.0), (1.0, true, 1e-3)] {
        let p = EquationParams::new(1.0, eta, nonlinear).unwrap();
        let phi = SpectralField::cosine_mode(&g, 2).scaled(amp);
        let cfg = SolverConfig { dt: 0.01, t_final: 1.0, save_every: 10, ..Default::default() };
        let tr = solve_stepper(&phi, &p, &cfg).unwrap();
        for (t, u) in tr.times().iter().zip(tr.states()) {
            let growth = u.l2_norm() / phi.l2_norm();
            let expected = (0.25 * eta * t).exp();
            assert!((growth / expected - 1.0).abs() < 0.01, "eta={eta} t={t} {growth} {expected}");
        }
        if !nonlinear {
            assert!(tr.final_state().l2_norm() > phi.l2_norm());
        }
    }
}

#[test]
fn zero_data_stays_zero() {
    let g = Grid::new(8.0, 64).unwrap();
    let z = SpectralField::zeros(&g);
    let p = EquationParams::default();
    let tr = solve_stepper(&z, &p, &SolverConfig { dt: 0.01, t_final: 0.1, ..Default::default() }).unwrap();
    assert!(tr.states().iter().all(|u| u.coeffs().iter().all(|c| *c == Complex64::new(0.0, 0.0))));
}

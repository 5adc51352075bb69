use alloc::vec::Vec;

use num_complex::Complex64;

use super::{check_amplitude, SolverConfig, Trajectory};
use crate::error::{Error, Result};
use crate::grid::{Grid, SpectralField};
use crate::spectral::{nonlinear_term, propagator_table, EquationParams};

/// Integrating-factor (Lawson) RK4 with exact linear propagation.
#[derive(Debug, Clone)]
pub struct Stepper {
    params: EquationParams,
    dt: f64,
    full: Vec<Complex64>,
    half: Vec<Complex64>,
}

fn mul(table: &[Complex64], u: &SpectralField) -> SpectralField {
    let mut out = u.clone();
    for (c, e) in out.coeffs_mut().iter_mut().zip(table) {
        *c *= e;
    }
    out
}

fn rhs(u: &SpectralField) -> SpectralField {
    nonlinear_term(u).scaled(-1.0)
}

fn combine(terms: &[(f64, &SpectralField)]) -> SpectralField {
    let mut out = SpectralField::zeros(terms[0].1.grid());
    for (a, f) in terms {
        out.axpy((*a).into(), f).expect("same grid");
    }
    out
}

impl Stepper {
    /// Fails with [`Error::Cfl`] when `dt · max|q(ξ)|` over the modes that
    /// can be excited exceeds one.
    pub fn new(grid: &Grid, params: &EquationParams, dt: f64) -> Result<Self> {
        params.validate()?;
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::param("dt", "must be positive and finite"));
        }
        let kmax = if params.nonlinear { grid.dealias_cutoff() } else { (grid.modes() / 2 - 1) as i64 };
        let qmax = params.q(kmax as f64 * grid.dxi()).abs();
        if dt * qmax > 1.0 {
            return Err(Error::Cfl { dt, limit: 1.0 / qmax });
        }
        Ok(Stepper {
            params: *params,
            dt,
            full: propagator_table(grid, params, dt),
            half: propagator_table(grid, params, 0.5 * dt),
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn step(&self, u: &SpectralField) -> SpectralField {
        let eu = mul(&self.full, u);
        if !self.params.nonlinear {
            return eu;
        }
        let h = self.dt;
        let hu = mul(&self.half, u);
        let k1 = rhs(u);
        let k2 = rhs(&mul(&self.half, &combine(&[(1.0, u), (0.5 * h, &k1)])));
        let k3 = rhs(&combine(&[(1.0, &hu), (0.5 * h, &k2)]));
        let k4 = rhs(&combine(&[(1.0, &eu), (h, &mul(&self.half, &k3))]));
        let mid = mul(&self.half, &combine(&[(1.0, &k2), (1.0, &k3)]));
        combine(&[(1.0, &eu), (h / 6.0, &mul(&self.full, &k1)), (h / 3.0, &mid), (h / 6.0, &k4)])
    }

    /// Advances `steps` steps from time `t0`, keeping every `save_every`-th
    /// state and the last one.
    pub fn run(
        &self,
        u0: &SpectralField,
        t0: f64,
        steps: usize,
        save_every: usize,
        cap: f64,
    ) -> Result<Trajectory> {
        let mut tr = Trajectory::new(self.params, alloc::vec![t0], alloc::vec![u0.clone()])?;
        let mut u = u0.clone();
        for n in 1..=steps {
            u = self.step(&u);
            let t = t0 + n as f64 * self.dt;
            check_amplitude(&u, t, cap)?;
            if n % save_every == 0 || n == steps {
                tr.push(t, u.clone());
            }
        }
        Ok(tr)
    }
}

/// Integrating-factor RK4 solution on `[0, t_final]`.
pub fn solve_stepper(phi: &SpectralField, params: &EquationParams, config: &SolverConfig) -> Result<Trajectory> {
    config.validate()?;
    check_amplitude(phi, 0.0, config.amplitude_cap)?;
    let (steps, dt) = config.steps();
    Stepper::new(phi.grid(), params, dt)?.run(phi, 0.0, steps, config.save_every, config.amplitude_cap)
}

/// Extends `traj` to `t_total` by restarting the stepper from an interior
/// sample and checking that the restarted segment reproduces the samples it
/// overlaps. Each segment covers `config.t_final`.
pub fn continue_globally(traj: &Trajectory, config: &SolverConfig, t_total: f64) -> Result<Trajectory> {
    config.validate()?;
    if !(t_total.is_finite() && t_total > traj.start()) {
        return Err(Error::param("t_total", "must lie after the trajectory start"));
    }
    let params = *traj.params();
    let (steps, dt) = config.steps();
    let stepper = Stepper::new(traj.grid(), &params, dt)?;
    let mut out = traj.clone();
    let tol = 1e-9 * t_total.abs().max(1.0);
    while out.end() < t_total - tol {
        let overlap = (out.len() / 4).max(1).min(out.len() - 1);
        let r = out.len() - 1 - overlap;
        let t0 = out.times()[r];
        let before = out.end();
        let seg = stepper.run(&out.states()[r], t0, steps, config.save_every, config.amplitude_cap)?;
        let scale = out.sup_norm(0.0).max(1.0);
        for (t, u) in seg.times().iter().zip(seg.states()) {
            if *t <= out.end() + tol {
                if let Some(j) = out.index_of_time(*t, tol) {
                    let residual = u.sub(&out.states()[j])?.l2_norm() / scale;
                    if residual > 1e-8 {
                        return Err(Error::RestartMismatch { time: *t, residual });
                    }
                }
            } else if *t <= t_total + tol {
                out.push(*t, u.clone());
            }
        }
        if out.end() <= before {
            return Err(Error::param("t_final", "segments make no progress"));
        }
    }
    Ok(out)
}

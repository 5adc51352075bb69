//! Time integration of the mild formulation
//! `u(t) = S(t)φ - ∫₀ᵗ S(t-t') ½∂_x(u²)(t') dt'`.
//!
//! Two independent integrators share [`SolverConfig`] and [`Trajectory`]:
//! an integrating-factor RK4 stepper and a Picard iteration on
//! Chebyshev-Lobatto time nodes.

mod contraction;
mod duhamel;
mod picard;
mod stepper;

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::grid::{Grid, SpectralField};
use crate::norms::{sobolev_norm, TimeWeightedTrace};
use crate::quad::lagrange_weights;
use crate::spectral::EquationParams;

pub use contraction::{
    bilinear_ratio, calibrate_bilinear_constant, contraction_time, default_probe_set, time_exponent,
    DEFAULT_CONTRACTION_CONSTANT,
};
pub use duhamel::{duhamel_integral, duhamel_with, DuhamelOptions};
pub use picard::{picard_weights, solve_picard, PicardSolution, PicardWeights};
pub use stepper::{continue_globally, solve_stepper, Stepper};

/// Largest admissible physical amplitude before a run is declared blown up.
pub const AMPLITUDE_CAP: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Method {
    /// Integrating-factor RK4.
    #[default]
    Stepper,
    /// Picard iteration of the integral equation.
    Picard,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub method: Method,
    /// Requested step; the stepper uses `T/ceil(T/dt)`.
    pub dt: f64,
    pub t_final: f64,
    /// Keep every `save_every`-th step (the final state is always kept).
    pub save_every: usize,
    pub picard_max_iters: usize,
    pub picard_tol: f64,
    /// Number of Chebyshev-Lobatto nodes for the Picard iteration.
    pub picard_nodes: usize,
    /// Sobolev index of the norm that measures Picard increments.
    pub norm_s: f64,
    pub amplitude_cap: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            method: Method::Stepper,
            dt: 1e-3,
            t_final: 1.0,
            save_every: 10,
            picard_max_iters: 60,
            picard_tol: 1e-10,
            picard_nodes: 24,
            norm_s: 0.0,
            amplitude_cap: AMPLITUDE_CAP,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.t_final.is_finite() && self.t_final > 0.0) {
            return Err(Error::param("t_final", "must be positive and finite"));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::param("dt", "must be positive and finite"));
        }
        if self.dt > self.t_final {
            return Err(Error::param("dt", "must not exceed t_final"));
        }
        if self.save_every == 0 {
            return Err(Error::param("save_every", "must be at least 1"));
        }
        if !(self.picard_tol.is_finite() && self.picard_tol > 0.0) {
            return Err(Error::param("picard_tol", "must be positive"));
        }
        if self.picard_max_iters == 0 {
            return Err(Error::param("picard_max_iters", "must be at least 1"));
        }
        if self.picard_nodes < 4 {
            return Err(Error::param("picard_nodes", "need at least 4 nodes"));
        }
        if !(self.amplitude_cap > 0.0) {
            return Err(Error::param("amplitude_cap", "must be positive"));
        }
        Ok(())
    }

    /// Number of steps and the step actually taken.
    pub fn steps(&self) -> (usize, f64) {
        let n = libm::ceil(self.t_final / self.dt - 1e-9).max(1.0) as usize;
        (n, self.t_final / n as f64)
    }
}

/// Time-ordered states of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    params: EquationParams,
    times: Vec<f64>,
    states: Vec<SpectralField>,
}

impl Trajectory {
    pub fn new(params: EquationParams, times: Vec<f64>, states: Vec<SpectralField>) -> Result<Self> {
        if times.is_empty() {
            return Err(Error::Empty("trajectory"));
        }
        if times.len() != states.len() {
            return Err(Error::param("states", "one state per time required"));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::param("times", "must be strictly increasing"));
        }
        let grid = states[0].grid();
        if states.iter().any(|s| s.grid() != grid) {
            return Err(Error::GridMismatch);
        }
        Ok(Trajectory { params, times, states })
    }

    pub fn params(&self) -> &EquationParams {
        &self.params
    }

    pub fn grid(&self) -> &Grid {
        self.states[0].grid()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[SpectralField] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn start(&self) -> f64 {
        self.times[0]
    }

    pub fn end(&self) -> f64 {
        self.times[self.times.len() - 1]
    }

    pub fn initial_state(&self) -> &SpectralField {
        &self.states[0]
    }

    pub fn final_state(&self) -> &SpectralField {
        &self.states[self.states.len() - 1]
    }

    /// Index of the sample whose time is within `tol` of `t`.
    pub fn index_of_time(&self, t: f64, tol: f64) -> Option<usize> {
        let i = self.times.partition_point(|&s| s < t - tol);
        (i < self.times.len() && libm::fabs(self.times[i] - t) <= tol).then_some(i)
    }

    /// Indices and Lagrange weights of the (up to) four samples bracketing
    /// `t`, used for cubic interpolation in time.
    pub fn stencil(&self, t: f64) -> Result<(usize, Vec<f64>)> {
        let (start, end) = (self.start(), self.end());
        if t < start - 1e-12 * libm::fabs(end).max(1.0) || t > end + 1e-12 * libm::fabs(end).max(1.0) {
            return Err(Error::TimeOutOfRange { t, start, end });
        }
        let n = self.times.len();
        let width = n.min(4);
        let i = self.times.partition_point(|&s| s <= t).saturating_sub(1);
        let lo = i.saturating_sub(1).min(n - width);
        Ok((lo, lagrange_weights(&self.times[lo..lo + width], t)))
    }

    /// State at time `t` by cubic interpolation between samples.
    pub fn at(&self, t: f64) -> Result<SpectralField> {
        if let Some(i) = self.index_of_time(t, 0.0) {
            return Ok(self.states[i].clone());
        }
        let (lo, w) = self.stencil(t)?;
        let mut out = SpectralField::zeros(self.grid());
        for (k, wk) in w.iter().enumerate() {
            out.axpy((*wk).into(), &self.states[lo + k])?;
        }
        Ok(out)
    }

    /// `sup_t ‖u(t)‖_{H^s}` over the samples.
    pub fn sup_norm(&self, s: f64) -> f64 {
        self.states.iter().map(|u| sobolev_norm(u, s)).fold(0.0, f64::max)
    }

    /// `sup_t ‖u(t) - v(t)‖_{H^s}` over common sample times.
    pub fn sup_distance(&self, other: &Trajectory, s: f64) -> Result<f64> {
        if self.grid() != other.grid() {
            return Err(Error::GridMismatch);
        }
        let tol = 1e-9 * libm::fabs(self.end()).max(1.0);
        let mut worst: f64 = 0.0;
        let mut matched = 0;
        for (t, u) in self.times.iter().zip(&self.states) {
            if let Some(j) = other.index_of_time(*t, tol) {
                worst = worst.max(sobolev_norm(&u.sub(&other.states[j])?, s));
                matched += 1;
            }
        }
        if matched == 0 {
            return Err(Error::Empty("set of common sample times"));
        }
        Ok(worst)
    }

    /// Norm trace on the samples with `t > 0`.
    pub fn trace(&self, s: f64) -> Result<TimeWeightedTrace> {
        let keep: Vec<usize> = (0..self.len()).filter(|&i| self.times[i] > 0.0).collect();
        let times: Vec<f64> = keep.iter().map(|&i| self.times[i]).collect();
        TimeWeightedTrace::from_states(&times, keep.iter().map(|&i| &self.states[i]), s)
    }

    pub(crate) fn push(&mut self, t: f64, u: SpectralField) {
        debug_assert!(t > self.end());
        self.times.push(t);
        self.states.push(u);
    }
}

/// Runs the method selected in `config`.
pub fn solve(phi: &SpectralField, params: &EquationParams, config: &SolverConfig) -> Result<Trajectory> {
    match config.method {
        Method::Stepper => solve_stepper(phi, params, config),
        Method::Picard => solve_picard(phi, params, config).map(|s| s.trajectory),
    }
}

pub(crate) fn amplitude(u: &SpectralField) -> f64 {
    // sup|u| ≤ (2π)^{-1/2} Σ|û|Δξ
    let sum: f64 = u.coeffs().iter().map(|c| c.norm()).sum();
    sum * u.grid().dxi() / libm::sqrt(2.0 * core::f64::consts::PI)
}

pub(crate) fn check_amplitude(u: &SpectralField, t: f64, cap: f64) -> Result<()> {
    if !u.is_finite() {
        return Err(Error::BlowUp { time: t, amplitude: f64::INFINITY });
    }
    let a = amplitude(u);
    if a > cap {
        return Err(Error::BlowUp { time: t, amplitude: a });
    }
    Ok(())
}

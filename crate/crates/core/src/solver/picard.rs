use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::{check_amplitude, SolverConfig, Trajectory};
use crate::error::{Error, Result};
use crate::grid::{Grid, SpectralField};
use crate::norms::sobolev_norm;
use crate::quad::{barycentric_basis, barycentric_weights, chebyshev_lobatto, GaussLegendre};
use crate::spectral::{nonlinear_term, semigroup_apply, EquationParams};

/// Product-integration weights
/// `w_ij(ξ) = ∫₀^{t_i} e^{Λ(ξ)(t_i-τ)} ℓ_j(τ) dτ`
/// for the Lagrange basis `ℓ_j` on Chebyshev-Lobatto nodes, tabulated on
/// the modes kept by the 2/3 rule.
#[derive(Debug, Clone)]
pub struct PicardWeights {
    pub nodes: Vec<f64>,
    modes: Vec<usize>,
    table: Vec<Complex64>,
}

impl PicardWeights {
    fn at(&self, i: usize, j: usize) -> &[Complex64] {
        let k = self.modes.len();
        let n = self.nodes.len();
        let start = (i * n + j) * k;
        &self.table[start..start + k]
    }

    /// `Σ_j w_ij F_j` on the retained modes.
    pub fn apply(&self, i: usize, sources: &[SpectralField]) -> SpectralField {
        let mut out = SpectralField::zeros(sources[0].grid());
        let coeffs = out.coeffs_mut();
        for (j, f) in sources.iter().enumerate() {
            let w = self.at(i, j);
            let fc = f.coeffs();
            for (m, &idx) in self.modes.iter().enumerate() {
                coeffs[idx] += w[m] * fc[idx];
            }
        }
        out
    }
}

pub fn picard_weights(grid: &Grid, params: &EquationParams, n: usize, t_final: f64) -> PicardWeights {
    let nodes = chebyshev_lobatto(n, t_final);
    let bary = barycentric_weights(&nodes);
    let cutoff = grid.dealias_cutoff();
    let ny = grid.nyquist_index();
    let modes: Vec<usize> =
        (0..grid.modes()).filter(|&j| j != ny && grid.mode(j).abs() <= cutoff).collect();
    let lambdas: Vec<Complex64> = modes.iter().map(|&j| params.exponent(grid.xi(j))).collect();
    let lmax = lambdas.iter().map(|l| l.norm()).fold(0.0, f64::max);
    let k = modes.len();
    let mut table = vec![Complex64::new(0.0, 0.0); n * n * k];
    let gl = GaussLegendre::new(8);
    for (i, &ti) in nodes.iter().enumerate().skip(1) {
        let panels = (libm::ceil(lmax * ti) as usize).max(16);
        for (tau, wq) in gl.composite(0.0, ti, panels) {
            let basis = barycentric_basis(&nodes, &bary, tau);
            let decay: Vec<Complex64> = lambdas.iter().map(|l| (l * (ti - tau)).exp() * wq).collect();
            for (j, b) in basis.iter().enumerate() {
                let row = &mut table[(i * n + j) * k..(i * n + j + 1) * k];
                for (r, e) in row.iter_mut().zip(&decay) {
                    *r += e * b;
                }
            }
        }
    }
    PicardWeights { nodes, modes, table }
}

#[derive(Debug, Clone)]
pub struct PicardSolution {
    /// States at the Chebyshev-Lobatto nodes.
    pub trajectory: Trajectory,
    pub iterations: usize,
    /// Successive increment ratios `‖u^{n+1}-u^n‖ / ‖u^n-u^{n-1}‖`.
    pub ratios: Vec<f64>,
    /// Increments `sup_i ‖u^{n+1}(t_i)-u^n(t_i)‖_{H^s}`.
    pub increments: Vec<f64>,
    /// `sup_i ‖u(t_i) - Ψ(u)(t_i)‖_{H^s}` for the returned iterate.
    pub residual: f64,
}

fn integral_map(
    linear: &[SpectralField],
    weights: &PicardWeights,
    u: &[SpectralField],
) -> Vec<SpectralField> {
    let sources: Vec<SpectralField> = u.iter().map(nonlinear_term).collect();
    linear
        .iter()
        .enumerate()
        .map(|(i, l)| if i == 0 { l.clone() } else { l.sub(&weights.apply(i, &sources)).expect("same grid") })
        .collect()
}

fn sup_distance(a: &[SpectralField], b: &[SpectralField], s: f64) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| sobolev_norm(&x.sub(y).expect("same grid"), s))
        .fold(0.0, f64::max)
}

/// Picard iteration `u ↦ S(t)φ - ∫₀ᵗ S(t-τ) ½∂_x(u²)(τ) dτ` on
/// `config.picard_nodes` Chebyshev-Lobatto nodes of `[0, t_final]`.
///
/// Stops when the sup-in-time `H^{norm_s}` increment drops below
/// `picard_tol`; gives up when the increment ratio stays `≥ 1` for three
/// consecutive iterations or the iteration cap is hit.
pub fn solve_picard(phi: &SpectralField, params: &EquationParams, config: &SolverConfig) -> Result<PicardSolution> {
    config.validate()?;
    params.validate()?;
    check_amplitude(phi, 0.0, config.amplitude_cap)?;
    let grid = phi.grid();
    let weights = picard_weights(grid, params, config.picard_nodes, config.t_final);
    let linear: Vec<SpectralField> = weights
        .nodes
        .iter()
        .map(|&t| semigroup_apply(phi, t, params))
        .collect::<Result<_>>()?;
    let s = config.norm_s;
    let finish = |u: Vec<SpectralField>, iterations, ratios, increments, residual| {
        Ok(PicardSolution {
            trajectory: Trajectory::new(*params, weights.nodes.clone(), u)?,
            iterations,
            ratios,
            increments,
            residual,
        })
    };
    if !params.nonlinear {
        return finish(linear, 1, Vec::new(), vec![0.0], 0.0);
    }
    let mut u = linear.clone();
    let mut ratios = Vec::new();
    let mut increments: Vec<f64> = Vec::new();
    let mut streak = 0;
    for it in 1..=config.picard_max_iters {
        let next = integral_map(&linear, &weights, &u);
        for (t, v) in weights.nodes.iter().zip(&next) {
            check_amplitude(v, *t, config.amplitude_cap)?;
        }
        let diff = sup_distance(&next, &u, s);
        if let Some(prev) = increments.last() {
            let ratio = if *prev > 0.0 { diff / prev } else { 0.0 };
            ratios.push(ratio);
            streak = if ratio >= 1.0 { streak + 1 } else { 0 };
            if streak >= 3 {
                return Err(Error::NonContraction { iteration: it, ratio });
            }
        }
        increments.push(diff);
        u = next;
        if diff < config.picard_tol {
            let residual = sup_distance(&integral_map(&linear, &weights, &u), &u, s);
            return finish(u, it, ratios, increments, residual);
        }
    }
    Err(Error::MaxIterations {
        iterations: config.picard_max_iters,
        residual: increments.last().copied().unwrap_or(f64::NAN),
    })
}

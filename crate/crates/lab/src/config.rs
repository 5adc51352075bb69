//! Run configuration: a strict TOML document with one experiment and its
//! parameter block. Every field has a default, so `experiment = "solve"`
//! alone is a complete config.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use chenlee_core::solver::{Method, SolverConfig, DEFAULT_CONTRACTION_CONSTANT};
use chenlee_core::{EquationParams, Grid};
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Solve,
    Smoothing,
    Contraction,
    IllposedC3,
    IllposedC2nd,
    BetaLimit,
    EtaLimit,
    Decay,
}

impl Experiment {
    pub const ALL: [Experiment; 8] = [
        Experiment::Solve,
        Experiment::Smoothing,
        Experiment::Contraction,
        Experiment::IllposedC3,
        Experiment::IllposedC2nd,
        Experiment::BetaLimit,
        Experiment::EtaLimit,
        Experiment::Decay,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Solve => "solve",
            Experiment::Smoothing => "smoothing",
            Experiment::Contraction => "contraction",
            Experiment::IllposedC3 => "illposed-c3",
            Experiment::IllposedC2nd => "illposed-c2nd",
            Experiment::BetaLimit => "beta-limit",
            Experiment::EtaLimit => "eta-limit",
            Experiment::Decay => "decay",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| LabError::invalid("experiment", format!("unknown experiment `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    /// Domain is `[-L, L)`.
    pub half_length: f64,
    /// Power of two, at least 8.
    pub modes: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig { half_length: 32.0 * std::f64::consts::PI, modes: 4096 }
    }
}

impl GridConfig {
    pub fn build(&self, field: &'static str) -> Result<Grid> {
        Grid::new(self.half_length, self.modes).map_err(|e| LabError::invalid(field, e.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EquationConfig {
    pub beta: f64,
    pub eta: f64,
    pub nonlinear: bool,
}

impl Default for EquationConfig {
    fn default() -> Self {
        EquationConfig { beta: 1.0, eta: 1.0, nonlinear: true }
    }
}

impl EquationConfig {
    pub fn params(&self) -> EquationParams {
        EquationParams { beta: self.beta, eta: self.eta, nonlinear: self.nonlinear }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodConfig {
    Stepper,
    Picard,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverBlock {
    pub method: MethodConfig,
    pub dt: f64,
    pub t_final: f64,
    pub save_every: usize,
    pub picard_max_iters: usize,
    pub picard_tol: f64,
    pub picard_nodes: usize,
}

impl Default for SolverBlock {
    fn default() -> Self {
        let d = SolverConfig::default();
        SolverBlock {
            method: MethodConfig::Stepper,
            dt: 5e-4,
            t_final: 1.0,
            save_every: 20,
            picard_max_iters: d.picard_max_iters,
            picard_tol: d.picard_tol,
            picard_nodes: d.picard_nodes,
        }
    }
}

impl SolverBlock {
    pub fn solver(&self) -> SolverConfig {
        SolverConfig {
            method: match self.method {
                MethodConfig::Stepper => Method::Stepper,
                MethodConfig::Picard => Method::Picard,
            },
            dt: self.dt,
            t_final: self.t_final,
            save_every: self.save_every,
            picard_max_iters: self.picard_max_iters,
            picard_tol: self.picard_tol,
            picard_nodes: self.picard_nodes,
            ..SolverConfig::default()
        }
    }
}

/// Initial data shared by the solver-based experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DataKind {
    /// `a·exp(-x²/w²)`.
    Gaussian,
    /// `∂ₓ` of the Gaussian: odd, mean free.
    GaussianDerivative,
    /// Seeded random phases under a Gaussian spectral envelope of scale
    /// `width`, rescaled to `L²` norm `amplitude`.
    RandomSmooth,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolveBlock {
    pub data: DataKind,
    pub amplitude: f64,
    pub width: f64,
    /// Sobolev index of the `‖u‖_{H^s}` column.
    pub s: f64,
    /// Mode numbers `k` whose `|û(ξ_k)|` is exported.
    pub modes: Vec<i64>,
    pub mass_tolerance: f64,
    /// Relative distance to the semigroup allowed for linear runs.
    pub linear_tolerance: f64,
    /// Write the final state as a binary snapshot.
    pub snapshot: bool,
}

impl Default for SolveBlock {
    fn default() -> Self {
        SolveBlock {
            data: DataKind::Gaussian,
            amplitude: 1.0,
            width: 1.0,
            s: 1.0,
            modes: vec![1, 8, 32],
            mass_tolerance: 1e-10,
            linear_tolerance: 1e-12,
            snapshot: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SmoothingBlock {
    pub grid: GridConfig,
    pub eta: f64,
    pub beta: f64,
    pub lambdas: Vec<f64>,
    pub t_min: f64,
    pub t_max: f64,
    pub points: usize,
    /// Spectral band `[band_lo, band_hi]` of the rough datum.
    pub band_lo: f64,
    pub band_hi: f64,
    pub decay: f64,
    /// Relative tolerance on the slope `-λ/2`.
    pub slope_tolerance: f64,
    /// Random fields for the `e^{ηt/4}` growth bound, on their own grid.
    pub growth_grid: GridConfig,
    pub growth_samples: usize,
    /// Sample times in `[0, 1]` for the growth supremum.
    pub growth_times: usize,
    pub growth_indices: Vec<f64>,
    pub growth_etas: Vec<f64>,
    /// Largest admissible constant in `|tξ²|^λ e^{η(|ξ|-ξ²)t} ≤ C f_λ(t)`,
    /// checked for every λ in `lambdas` and η in `growth_etas`.
    pub multiplier_constant_max: f64,
    pub multiplier_t_min: f64,
    pub multiplier_t_max: f64,
    pub multiplier_times: usize,
    /// Brute-force maximum over `xi_points` uniform points of `[-xi_max, xi_max]`.
    pub multiplier_xi_max: f64,
    pub multiplier_xi_points: usize,
}

impl Default for SmoothingBlock {
    fn default() -> Self {
        SmoothingBlock {
            grid: GridConfig { half_length: 4.0 * std::f64::consts::PI, modes: 8192 },
            eta: 1.0,
            beta: 1.0,
            lambdas: vec![0.5, 1.0, 2.0],
            t_min: 1e-4,
            t_max: 1e-2,
            points: 21,
            band_lo: 1.0,
            band_hi: 1000.0,
            decay: 0.5,
            slope_tolerance: 0.1,
            growth_grid: GridConfig { half_length: 16.0, modes: 512 },
            growth_samples: 100,
            growth_times: 101,
            growth_indices: vec![-0.4, 0.0, 1.0],
            growth_etas: vec![0.5, 1.0, 2.0],
            multiplier_constant_max: 10.0,
            multiplier_t_min: 1e-3,
            multiplier_t_max: 1.0,
            multiplier_times: 31,
            multiplier_xi_max: 200.0,
            multiplier_xi_points: 400_001,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ContractionBlock {
    pub amplitudes: Vec<f64>,
    pub width: f64,
    pub s: f64,
    /// Bilinear constant `C` of the existence time.
    pub constant: f64,
    pub max_iterations: usize,
    pub tolerance: f64,
    pub ratio_max: f64,
    pub residual_max: f64,
    /// `L²` distance allowed between Picard and stepper states.
    pub agreement: f64,
    /// Stepper steps per Picard node interval.
    pub substeps: usize,
    pub nodes: usize,
    pub mass_tolerance: f64,
}

impl Default for ContractionBlock {
    fn default() -> Self {
        ContractionBlock {
            amplitudes: vec![1e-3, 1e-2, 0.1],
            width: 1.0,
            s: 0.0,
            constant: DEFAULT_CONTRACTION_CONSTANT,
            max_iterations: 40,
            tolerance: 1e-12,
            ratio_max: 0.75,
            residual_max: 1e-10,
            agreement: 1e-6,
            substeps: 16,
            nodes: 24,
            mass_tolerance: 1e-10,
        }
    }
}

/// Parameters of one growth sweep, shared by both ill-posedness experiments.
#[derive(Debug, Clone, PartialEq)]
pub struct IllposedBlock {
    pub s: f64,
    pub epsilon: f64,
    pub n_list: Vec<f64>,
    pub beta: f64,
    pub eta: f64,
    pub points_per_band: usize,
    pub kernel_samples: usize,
    pub slope_tolerance: f64,
    /// Index of a second sweep whose slope must be `≤ 0`.
    pub companion_s: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct C3Block {
    pub s: f64,
    pub epsilon: f64,
    pub n_list: Vec<f64>,
    pub beta: f64,
    pub eta: f64,
    pub points_per_band: usize,
    pub kernel_samples: usize,
    pub slope_tolerance: f64,
    pub companion_s: Option<f64>,
}

impl Default for C3Block {
    fn default() -> Self {
        C3Block {
            s: -0.8,
            epsilon: 0.1,
            n_list: vec![64.0, 128.0, 256.0, 512.0, 1024.0],
            beta: 1.0,
            eta: 0.1,
            points_per_band: 64,
            kernel_samples: 200,
            slope_tolerance: 0.15,
            companion_s: Some(-0.3),
        }
    }
}

impl C3Block {
    pub fn sweep(&self) -> IllposedBlock {
        IllposedBlock {
            s: self.s,
            epsilon: self.epsilon,
            n_list: self.n_list.clone(),
            beta: self.beta,
            eta: self.eta,
            points_per_band: self.points_per_band,
            kernel_samples: self.kernel_samples,
            slope_tolerance: self.slope_tolerance,
            companion_s: self.companion_s,
        }
    }
}

/// The non-dispersive sweep always runs with `β = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct C2Block {
    pub s: f64,
    pub epsilon: f64,
    pub n_list: Vec<f64>,
    pub eta: f64,
    pub points_per_band: usize,
    pub kernel_samples: usize,
    pub slope_tolerance: f64,
}

impl Default for C2Block {
    fn default() -> Self {
        C2Block {
            s: -0.8,
            epsilon: 0.05,
            n_list: vec![64.0, 128.0, 256.0, 512.0, 1024.0],
            eta: 0.1,
            points_per_band: 64,
            kernel_samples: 200,
            slope_tolerance: 0.15,
        }
    }
}

impl C2Block {
    pub fn sweep(&self) -> IllposedBlock {
        IllposedBlock {
            s: self.s,
            epsilon: self.epsilon,
            n_list: self.n_list.clone(),
            beta: 0.0,
            eta: self.eta,
            points_per_band: self.points_per_band,
            kernel_samples: self.kernel_samples,
            slope_tolerance: self.slope_tolerance,
            companion_s: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BetaLimitBlock {
    pub values: Vec<f64>,
    pub s: f64,
    pub amplitude: f64,
    pub width: f64,
    pub slope_tolerance: f64,
    pub monotone_slack: f64,
    pub mass_tolerance: f64,
}

impl Default for BetaLimitBlock {
    fn default() -> Self {
        BetaLimitBlock {
            values: vec![0.4, 0.2, 0.1, 0.05],
            s: 0.0,
            amplitude: 1.0,
            width: 1.0,
            slope_tolerance: 0.15,
            monotone_slack: 0.05,
            mass_tolerance: 1e-10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EtaLimitBlock {
    pub values: Vec<f64>,
    pub s: f64,
    pub width: f64,
    /// `‖φ‖_{H^s}` after normalization.
    pub norm: f64,
    pub slope_tolerance: f64,
    /// Random fields behind the `C_s` calibration (safety factor 2).
    pub calibration_samples: usize,
    /// Upper cap on the horizon; the run uses `min(t_cap, T'_s/2)`.
    pub t_cap: f64,
    pub mass_tolerance: f64,
}

impl Default for EtaLimitBlock {
    fn default() -> Self {
        EtaLimitBlock {
            values: vec![0.2, 0.1, 0.05, 0.025],
            s: 2.0,
            width: 1.0,
            norm: 1.0,
            slope_tolerance: 0.1,
            calibration_samples: 50,
            t_cap: 1.0,
            mass_tolerance: 1e-10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DecayBlock {
    pub data: DataKind,
    pub amplitude: f64,
    pub width: f64,
    pub yacasi_max: f64,
    pub mass_tolerance: f64,
    pub energy_residual_max: f64,
    /// Smallest residual reduction when `dt` is halved.
    pub halving_ratio_min: f64,
}

impl Default for DecayBlock {
    fn default() -> Self {
        DecayBlock {
            data: DataKind::GaussianDerivative,
            amplitude: 1.0,
            width: 2.0,
            yacasi_max: 1e-8,
            mass_tolerance: 1e-10,
            energy_residual_max: 1e-5,
            halving_ratio_min: 4.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub experiment: Experiment,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub equation: EquationConfig,
    #[serde(default)]
    pub solver: SolverBlock,
    #[serde(default)]
    pub solve: SolveBlock,
    #[serde(default)]
    pub smoothing: SmoothingBlock,
    #[serde(default)]
    pub contraction: ContractionBlock,
    #[serde(default, rename = "illposed-c3")]
    pub illposed_c3: C3Block,
    #[serde(default, rename = "illposed-c2nd")]
    pub illposed_c2nd: C2Block,
    #[serde(default, rename = "beta-limit")]
    pub beta_limit: BetaLimitBlock,
    #[serde(default, rename = "eta-limit")]
    pub eta_limit: EtaLimitBlock,
    #[serde(default)]
    pub decay: DecayBlock,
}

impl RunConfig {
    pub fn new(experiment: Experiment) -> Self {
        RunConfig {
            experiment,
            seed: 0,
            output_dir: None,
            grid: GridConfig::default(),
            equation: EquationConfig::default(),
            solver: SolverBlock::default(),
            solve: SolveBlock::default(),
            smoothing: SmoothingBlock::default(),
            contraction: ContractionBlock::default(),
            illposed_c3: C3Block::default(),
            illposed_c2nd: C2Block::default(),
            beta_limit: BetaLimitBlock::default(),
            eta_limit: EtaLimitBlock::default(),
            decay: DecayBlock::default(),
        }
    }

    /// Scales the selected experiment down for quick checks: half the
    /// modes with four times the step, half the sample points, or one `N`
    /// fewer.
    pub fn quick(mut self) -> Self {
        let coarser = |grid: &mut GridConfig, solver: &mut SolverBlock| {
            grid.modes = (grid.modes / 2).max(8);
            solver.dt = (4.0 * solver.dt).min(solver.t_final);
        };
        match self.experiment {
            Experiment::Smoothing => {
                self.smoothing.points = self.smoothing.points.div_ceil(2).max(4);
                self.smoothing.growth_samples = self.smoothing.growth_samples.div_ceil(4);
                self.smoothing.multiplier_times = self.smoothing.multiplier_times.div_ceil(2).max(2);
            }
            Experiment::IllposedC3 => {
                self.illposed_c3.n_list.pop();
            }
            Experiment::IllposedC2nd => {
                self.illposed_c2nd.n_list.pop();
            }
            _ => coarser(&mut self.grid, &mut self.solver),
        }
        self
    }

    pub fn validate(&self) -> Result<()> {
        positive("grid.half_length", self.grid.half_length)?;
        self.grid.build("grid.modes")?;
        let e = &self.equation;
        non_negative("beta", e.beta)?;
        non_negative("eta", e.eta)?;
        let s = &self.solver;
        positive("solver.dt", s.dt)?;
        positive("solver.t_final", s.t_final)?;
        positive("solver.picard_tol", s.picard_tol)?;
        at_least("solver.save_every", s.save_every, 1)?;
        at_least("solver.picard_max_iters", s.picard_max_iters, 1)?;
        at_least("solver.picard_nodes", s.picard_nodes, 4)?;
        if s.dt > s.t_final {
            return Err(LabError::invalid("solver.dt", "must not exceed solver.t_final"));
        }
        match self.experiment {
            Experiment::Solve => {
                let b = &self.solve;
                positive("solve.width", b.width)?;
                finite("solve.amplitude", b.amplitude)?;
                finite("solve.s", b.s)?;
                positive("solve.mass_tolerance", b.mass_tolerance)?;
                positive("solve.linear_tolerance", b.linear_tolerance)?;
                let half = (self.grid.modes / 2) as i64;
                if b.modes.iter().any(|k| k.abs() >= half) {
                    return Err(LabError::invalid("solve.modes", "mode numbers must lie below M/2"));
                }
            }
            Experiment::Smoothing => {
                let b = &self.smoothing;
                positive("smoothing.grid.half_length", b.grid.half_length)?;
                let g = b.grid.build("smoothing.grid.modes")?;
                positive("smoothing.eta", b.eta)?;
                non_negative("smoothing.beta", b.beta)?;
                nonempty("smoothing.lambdas", &b.lambdas)?;
                if b.lambdas.iter().any(|l| !(*l > 0.0)) {
                    return Err(LabError::invalid("smoothing.lambdas", "must be positive"));
                }
                positive("smoothing.t_min", b.t_min)?;
                if !(b.t_max > b.t_min) {
                    return Err(LabError::invalid("smoothing.t_max", "must exceed t_min"));
                }
                at_least("smoothing.points", b.points, 3)?;
                positive("smoothing.band_lo", b.band_lo)?;
                if !(b.band_hi > b.band_lo && b.band_hi <= g.max_xi()) {
                    return Err(LabError::invalid("smoothing.band_hi", "must exceed band_lo and fit on the grid"));
                }
                positive("smoothing.slope_tolerance", b.slope_tolerance)?;
                positive("smoothing.growth_grid.half_length", b.growth_grid.half_length)?;
                b.growth_grid.build("smoothing.growth_grid.modes")?;
                at_least("smoothing.growth_samples", b.growth_samples, 1)?;
                at_least("smoothing.growth_times", b.growth_times, 2)?;
                nonempty("smoothing.growth_indices", &b.growth_indices)?;
                nonempty("smoothing.growth_etas", &b.growth_etas)?;
                if b.growth_etas.iter().any(|v| !(*v >= 0.0)) {
                    return Err(LabError::invalid("smoothing.growth_etas", "must be non-negative"));
                }
                positive("smoothing.multiplier_constant_max", b.multiplier_constant_max)?;
                positive("smoothing.multiplier_t_min", b.multiplier_t_min)?;
                if !(b.multiplier_t_max > b.multiplier_t_min) {
                    return Err(LabError::invalid("smoothing.multiplier_t_max", "must exceed multiplier_t_min"));
                }
                at_least("smoothing.multiplier_times", b.multiplier_times, 2)?;
                positive("smoothing.multiplier_xi_max", b.multiplier_xi_max)?;
                at_least("smoothing.multiplier_xi_points", b.multiplier_xi_points, 3)?;
            }
            Experiment::Contraction => {
                let b = &self.contraction;
                nonempty("contraction.amplitudes", &b.amplitudes)?;
                positive("contraction.width", b.width)?;
                if !(b.s > -0.5) {
                    return Err(LabError::invalid("contraction.s", "must exceed -1/2"));
                }
                positive("contraction.constant", b.constant)?;
                at_least("contraction.max_iterations", b.max_iterations, 1)?;
                positive("contraction.tolerance", b.tolerance)?;
                positive("contraction.ratio_max", b.ratio_max)?;
                positive("contraction.residual_max", b.residual_max)?;
                positive("contraction.agreement", b.agreement)?;
                at_least("contraction.substeps", b.substeps, 1)?;
                at_least("contraction.nodes", b.nodes, 4)?;
                positive("contraction.mass_tolerance", b.mass_tolerance)?;
            }
            Experiment::IllposedC3 => validate_illposed("illposed-c3", &self.illposed_c3.sweep())?,
            Experiment::IllposedC2nd => {
                validate_illposed("illposed-c2nd", &self.illposed_c2nd.sweep())?;
                positive("illposed-c2nd.eta", self.illposed_c2nd.eta)?;
            }
            Experiment::BetaLimit => {
                let b = &self.beta_limit;
                decreasing("beta-limit.values", &b.values)?;
                positive("eta", e.eta)?;
                positive("beta-limit.width", b.width)?;
                positive("beta-limit.slope_tolerance", b.slope_tolerance)?;
                non_negative("beta-limit.monotone_slack", b.monotone_slack)?;
                positive("beta-limit.mass_tolerance", b.mass_tolerance)?;
                if !(b.s > -0.5) {
                    return Err(LabError::invalid("beta-limit.s", "must exceed -1/2"));
                }
            }
            Experiment::EtaLimit => {
                let b = &self.eta_limit;
                decreasing("eta-limit.values", &b.values)?;
                positive("beta", e.beta)?;
                positive("eta-limit.width", b.width)?;
                positive("eta-limit.norm", b.norm)?;
                positive("eta-limit.slope_tolerance", b.slope_tolerance)?;
                positive("eta-limit.t_cap", b.t_cap)?;
                positive("eta-limit.mass_tolerance", b.mass_tolerance)?;
                at_least("eta-limit.calibration_samples", b.calibration_samples, 1)?;
                if !(b.s > 1.5) {
                    return Err(LabError::invalid("eta-limit.s", "must exceed 3/2"));
                }
            }
            Experiment::Decay => {
                let b = &self.decay;
                // the moment rates need uniformly spaced samples
                if self.solver.solver().steps().0 % s.save_every != 0 {
                    return Err(LabError::invalid("solver.save_every", "must divide the number of steps for decay"));
                }
                positive("decay.width", b.width)?;
                finite("decay.amplitude", b.amplitude)?;
                positive("decay.yacasi_max", b.yacasi_max)?;
                positive("decay.mass_tolerance", b.mass_tolerance)?;
                positive("decay.energy_residual_max", b.energy_residual_max)?;
                positive("decay.halving_ratio_min", b.halving_ratio_min)?;
            }
        }
        Ok(())
    }
}

fn validate_illposed(prefix: &str, b: &IllposedBlock) -> Result<()> {
    let field = |name: &str| format!("{prefix}.{name}");
    if !(b.epsilon > 0.0 && b.epsilon < 1.0) {
        return Err(LabError::invalid(field("epsilon"), "must lie in (0, 1)"));
    }
    finite(&field("s"), b.s)?;
    if b.n_list.len() < 4 || b.n_list.windows(2).any(|w| w[1] <= w[0]) || b.n_list[0] < 32.0 {
        return Err(LabError::invalid(field("n_list"), "need at least four increasing values, all ≥ 32"));
    }
    non_negative(&field("beta"), b.beta)?;
    non_negative(&field("eta"), b.eta)?;
    at_least(&field("points_per_band"), b.points_per_band, chenlee_core::flow::MIN_BAND_POINTS)?;
    at_least(&field("kernel_samples"), b.kernel_samples, 1)?;
    positive(&field("slope_tolerance"), b.slope_tolerance)?;
    if let Some(s) = b.companion_s {
        finite(&field("companion_s"), s)?;
    }
    Ok(())
}

fn finite(field: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(LabError::invalid(field, "must be finite"))
    }
}

fn positive(field: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(LabError::invalid(field, format!("must be positive, got {v}")))
    }
}

fn non_negative(field: &str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(LabError::invalid(field, format!("must be non-negative, got {v}")))
    }
}

fn at_least(field: &str, v: usize, min: usize) -> Result<()> {
    if v >= min {
        Ok(())
    } else {
        Err(LabError::invalid(field, format!("must be at least {min}, got {v}")))
    }
}

fn nonempty(field: &str, v: &[f64]) -> Result<()> {
    if v.is_empty() || v.iter().any(|x| !x.is_finite()) {
        Err(LabError::invalid(field, "must be a non-empty list of finite numbers"))
    } else {
        Ok(())
    }
}

fn decreasing(field: &str, v: &[f64]) -> Result<()> {
    if v.len() < 4 || v.iter().any(|x| !(x.is_finite() && *x > 0.0)) || v.windows(2).any(|w| w[1] >= w[0]) {
        Err(LabError::invalid(field, "need at least four positive, strictly decreasing values"))
    } else {
        Ok(())
    }
}

/// Parses and validates a TOML run configuration. Unknown keys are errors.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let cfg: RunConfig = toml::from_str(text).map_err(|e| LabError::Parse(e.to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

/// Like [`parse_config`] for a document used with an experiment named on
/// the command line. The document may omit `experiment`; if it names one,
/// it must be the same.
pub fn parse_config_for(text: &str, experiment: Experiment) -> Result<RunConfig> {
    let table: toml::Table = text.parse().map_err(|e: toml::de::Error| LabError::Parse(e.to_string()))?;
    let cfg: RunConfig = match table.get("experiment") {
        Some(_) => toml::from_str(text).map_err(|e| LabError::Parse(e.to_string()))?,
        None => {
            let mut table = table;
            table.insert("experiment".into(), toml::Value::String(experiment.name().into()));
            table.try_into().map_err(|e: toml::de::Error| LabError::Parse(e.to_string()))?
        }
    };
    if cfg.experiment != experiment {
        return Err(LabError::invalid(
            "experiment",
            format!("config selects `{}` but `{experiment}` was requested", cfg.experiment),
        ));
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Canonical TOML echo of a configuration.
pub fn to_toml(cfg: &RunConfig) -> Result<String> {
    toml::to_string(cfg).map_err(|e| LabError::Parse(e.to_string()))
}

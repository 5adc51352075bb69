use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Everything that can go wrong inside the numerical core.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A parameter is outside its admissible range. `name` is the field.
    InvalidParameter { name: &'static str, reason: &'static str },
    /// Two fields live on different grids.
    GridMismatch,
    /// The semigroup is forward-only.
    NegativeTime(f64),
    /// The 2/3-rule budget was exceeded by the quadratic product.
    AliasingBudget { fraction: f64, budget: f64 },
    /// An empty trace or trajectory was handed to a reduction.
    Empty(&'static str),
    /// A Picard iteration stopped contracting.
    NonContraction { iteration: usize, ratio: f64 },
    /// The Picard iteration hit its iteration cap.
    MaxIterations { iterations: usize, residual: f64 },
    /// NaN/Inf or amplitude above the cap.
    BlowUp { time: f64, amplitude: f64 },
    /// `dt * max|q(ξ)|` exceeds one on the retained modes.
    Cfl { dt: f64, limit: f64 },
    /// Node doubling in the time quadrature changed the result too much.
    QuadratureConvergence { change: f64, tolerance: f64 },
    /// Weighted quantities are not faithful on the truncated box.
    BoundaryMass { fraction: f64, threshold: f64 },
    /// Too few grid frequencies inside a frequency band.
    UnresolvedBand { points: usize, required: usize },
    /// A requested frequency window is not on the grid.
    WindowOutsideGrid { lo: f64, hi: f64, max: f64 },
    /// Restarted segment disagrees with the previous one on the overlap.
    RestartMismatch { time: f64, residual: f64 },
    /// A time lies outside the trajectory.
    TimeOutOfRange { t: f64, start: f64, end: f64 },
    /// A sweep failed part-way; `completed` entries finished.
    SweepAborted { completed: usize, cause: alloc::boxed::Box<Error> },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter { name, reason } => write!(f, "invalid `{name}`: {reason}"),
            Error::GridMismatch => f.write_str("fields live on different grids"),
            Error::NegativeTime(t) => write!(f, "semigroup evaluated at negative time {t}"),
            Error::AliasingBudget { fraction, budget } => write!(
                f,
                "upper third of the product spectrum carries {fraction:.3e} of the energy (budget {budget:.1e})"
            ),
            Error::Empty(what) => write!(f, "empty {what}"),
            Error::NonContraction { iteration, ratio } => write!(
                f,
                "Picard map is not contracting (ratio {ratio:.3} at iteration {iteration})"
            ),
            Error::MaxIterations { iterations, residual } => write!(
                f,
                "Picard iteration did not converge in {iterations} iterations (residual {residual:.3e})"
            ),
            Error::BlowUp { time, amplitude } => {
                write!(f, "solution blew up at t = {time} (amplitude {amplitude:.3e})")
            }
            Error::Cfl { dt, limit } => write!(f, "dt = {dt} exceeds the phase limit {limit}"),
            Error::QuadratureConvergence { change, tolerance } => write!(
                f,
                "time quadrature not converged (node doubling changed result by {change:.3e} > {tolerance:.1e})"
            ),
            Error::BoundaryMass { fraction, threshold } => write!(
                f,
                "boundary region carries {fraction:.3e} of the weighted mass (threshold {threshold:.1e})"
            ),
            Error::UnresolvedBand { points, required } => write!(
                f,
                "frequency band holds {points} grid points, at least {required} required"
            ),
            Error::WindowOutsideGrid { lo, hi, max } => write!(
                f,
                "frequency window [{lo}, {hi}] exceeds the grid's largest frequency {max}"
            ),
            Error::RestartMismatch { time, residual } => write!(
                f,
                "restart overlap residual {residual:.3e} at t = {time}"
            ),
            Error::TimeOutOfRange { t, start, end } => {
                write!(f, "time {t} outside trajectory range [{start}, {end}]")
            }
            Error::SweepAborted { completed, cause } => {
                write!(f, "sweep aborted after {completed} entries: {cause}")
            }
        }
    }
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: &'static str) -> Self {
        Error::InvalidParameter { name, reason }
    }

    /// True for failures of the numerics (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        !matches!(self, Error::InvalidParameter { .. } | Error::GridMismatch)
    }
}

impl core::error::Error for Error {}

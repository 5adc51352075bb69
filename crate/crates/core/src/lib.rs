//! Pseudospectral kernels for the Chen-Lee equation
//!
//! ```text
//! u_t + u u_x + beta H u_xx + eta (H u_x - u_xx) = 0
//! ```
//!
//! posed on a large periodic box `[-L, L)` standing in for the real line.
//! The crate is `no_std` (it needs `alloc`) and carries everything that is
//! pure computation: Fourier grids and transforms, the linear symbols and
//! their semigroup, Sobolev and weighted norms, two solvers for the mild
//! (Duhamel) formulation, closed-form flow-map derivative terms for the
//! ill-posedness experiments, the two singular-limit sweeps and the moment
//! diagnostics. File formats, configuration and the command line live in
//! the `chenlee-lab` crate.
//!
//! Fourier coefficients approximate the continuum transform
//! `û(ξ) = (2π)^{-1/2} ∫ u(x) e^{-iξx} dx` at the grid frequencies
//! `ξ_k = πk/L`, so the symbols apply verbatim and Plancherel reads
//! `Σ |û(ξ_k)|² Δξ = Σ |u(x_j)|² Δx` with `Δξ = π/L`.
#![no_std]
#![warn(missing_debug_implementations)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod decay;
pub mod error;
pub mod fft;
pub mod fields;
pub mod flow;
pub mod grid;
pub mod limits;
pub mod norms;
pub mod quad;
pub mod report;
pub mod solver;
pub mod spectral;

pub use error::{Error, Result};
pub use grid::{Grid, SpectralField};
pub use num_complex::Complex64;
pub use report::ExperimentReport;
pub use spectral::EquationParams;

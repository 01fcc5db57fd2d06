//! Numerical spectral laboratory for the functional difference operator
//! `H = H₀ + W` on the line, where `H₀` is Fourier multiplication by
//! `cosh(ξ)` (with `ψ̂(ξ) = ∫ e^{-2πixξ} ψ(x) dx`) and
//! `W(x) = |x|^p e^{|x|^β}`.
//!
//! The crate is organised bottom-up:
//!
//! - [`quad`]: adaptive Gauss–Kronrod quadrature used by every integral below.
//! - [`potential`]: the potential family, its inverse, Gaussian heat smoothing
//!   and the affine / dilation error certificates.
//! - [`coherent`]: Gaussian coherent states, the coherent-state transform,
//!   marginal identity checks, the kinetic multiplier and Gaussian moments.
//! - [`linalg`]: dense symmetric eigensolver and symmetric-indefinite
//!   factorization used for inertia counting.
//! - [`spectral`]: discretization of `H` on a periodic grid, spectra,
//!   eigenvalue counting and Riesz means.
//! - [`phasespace`]: positive-part phase-space integrals and their 1D
//!   reductions, integration-by-parts identities and leading terms.
//! - [`schedule`]: λ-dependent scale schedules, upper/lower Riesz-mean
//!   bounds and convergence diagnostics.

pub mod coherent;
pub mod error;
pub mod linalg;
pub mod phasespace;
pub mod potential;
pub mod quad;
pub mod schedule;
pub mod spectral;

pub use error::{Error, Result};

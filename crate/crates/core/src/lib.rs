//! Radial harmonic analysis on Damek-Ricci spaces (harmonic NA groups) and
//! dispersive-equation experiments built on it.
//!
//! The library evaluates spherical functions by an ODE solver, implements
//! the spherical Fourier transform with its Plancherel calibration, applies
//! dispersive propagators `e^{i t psi(sqrt(-L))}` for phases growing like
//! `lambda^a` with `a` in (0, 1), and ships experiment harnesses that probe
//! the `beta > a/4` regularity threshold of the associated maximal function
//! together with the counterexample family that defeats it below the
//! threshold.
//!
//! Module map:
//! - [`specfun`]: structural space parameters, volume density, complex
//!   log-Gamma, Bessel kernels.
//! - [`spherical`]: the spherical function `phi_lambda` and its two series
//!   envelopes.
//! - [`spectral`]: c-function, grids, transforms, Sobolev norms, the
//!   high-frequency correspondence multiplier and the Euclidean radial
//!   transform.
//! - [`dispersive`]: phase functions, propagators, maximal and linearized
//!   maximal operators.
//! - [`experiments`]: reproducible harnesses (sharpness, maximal ratio,
//!   oscillatory kernel bound, weighted-norm check, convergence).

// `!(x > 0.0)`-style guards are deliberate throughout: unlike `x <= 0.0`
// they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dispersive;
pub mod error;
pub mod experiments;
pub mod numerics;
pub mod specfun;
pub mod spectral;
pub mod spherical;

pub use error::{Error, Result};

//! Shared numerical kernels: quadrature rules, an adaptive Runge-Kutta
//! integrator and monotone cubic interpolation.

pub mod interp;
pub mod ode;
pub mod quad;

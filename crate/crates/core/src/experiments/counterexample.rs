//! The counterexample family `f_N` that defeats the maximal estimate below
//! the `beta = a/4` threshold.
//!
//! The family is defined on the frequency side,
//!
//! ```text
//! f_N^(lambda) = N^{-1/2} eta(-N^{a/2-1} lambda + N^{a/2}) |c(lambda)|,
//! ```
//!
//! a bump of height `N^{-1/2} |c|` supported in the window
//! `(N - N^{1-a/2}, N + N^{1-a/2})`, probed on the radius annulus
//! `A_{N,eps} = (a eps N^{a-1}, 2 a eps N^{a-1})` with the stationary time
//! choice `t(s) = s N^{1-a} / a` (which lands in `(eps, 2 eps)` there).

use super::bump::BumpFunction;
use crate::error::{Error, Result};
use crate::specfun::SpaceParams;
use crate::spectral::{c_function, SpectralGrid, Spectrum};
use num_complex::Complex64;

/// Parameters of one member of the counterexample family.
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct CounterexampleSpec {
    pub space: SpaceParams,
    /// Phase degree, in (0, 1).
    pub a: f64,
    /// Frequency-scale integer N >= 2.
    pub n: u32,
    /// Annulus parameter, in (0, 1/2); "sufficiently small" in the sharpness
    /// argument, exposed because the lower-bound pass may require lowering it.
    pub epsilon: f64,
    /// Regularity index of the Sobolev norm under test.
    pub beta: f64,
    /// Number of spectral nodes resolving the support window (>= 64).
    pub nodes: usize,
}

impl CounterexampleSpec {
    pub fn new(space: SpaceParams, a: f64, n: u32, epsilon: f64, beta: f64) -> Result<Self> {
        if !(a > 0.0 && a < 1.0) {
            return Err(Error::Argument(format!(
                "degree a must be in (0,1), got {a}"
            )));
        }
        if n < 2 {
            return Err(Error::Argument(format!("N must be >= 2, got {n}")));
        }
        if !(epsilon > 0.0 && epsilon < 0.5) {
            return Err(Error::Argument(format!(
                "epsilon must be in (0, 1/2), got {epsilon}"
            )));
        }
        if !(beta >= 0.0) {
            return Err(Error::Argument(format!("beta must be >= 0, got {beta}")));
        }
        let spec = Self {
            space,
            a,
            n,
            epsilon,
            beta,
            nodes: 256,
        };
        let (lo, hi) = spec.annulus();
        debug_assert!(0.0 < lo && hi < 1.0, "annulus must sit inside (0, 1)");
        Ok(spec)
    }

    pub fn with_nodes(mut self, nodes: usize) -> Self {
        self.nodes = nodes;
        self
    }

    /// Spectral support window `(N - N^{1-a/2}, N + N^{1-a/2})`.
    pub fn support_window(&self) -> (f64, f64) {
        let nf = self.n as f64;
        let half = nf.powf(1.0 - 0.5 * self.a);
        (nf - half, nf + half)
    }

    /// The radius annulus `(a eps N^{a-1}, 2 a eps N^{a-1})` inside (0, 1).
    pub fn annulus(&self) -> (f64, f64) {
        let scale = self.a * self.epsilon * (self.n as f64).powf(self.a - 1.0);
        (scale, 2.0 * scale)
    }

    /// The stationary time choice `t(s) = s N^{1-a} / a`.
    pub fn time_of_radius(&self, s: f64) -> f64 {
        s * (self.n as f64).powf(1.0 - self.a) / self.a
    }

    /// The defining frequency-side formula, evaluated exactly.
    pub fn spectrum_value(&self, lambda: f64) -> Result<f64> {
        let nf = self.n as f64;
        let xi = -nf.powf(0.5 * self.a - 1.0) * lambda + nf.powf(0.5 * self.a);
        let eta = BumpFunction::eta().eval(xi);
        if eta == 0.0 {
            return Ok(0.0);
        }
        Ok(nf.powf(-0.5) * eta * c_function(self.space, lambda)?.norm())
    }
}

/// Samples `f_N^` on a Gauss-Legendre grid over its support window.
///
/// The grid must resolve the window with at least 64 nodes; the peak value
/// at `lambda = N` is `N^{-1/2} |c(N)|` and the values vanish at the window
/// edges.
pub fn build_counterexample(spec: &CounterexampleSpec) -> Result<Spectrum> {
    if spec.nodes < 64 {
        return Err(Error::Resolution(format!(
            "support window needs >= 64 spectral nodes, got {}",
            spec.nodes
        )));
    }
    let (lo, hi) = spec.support_window();
    let panels = spec.nodes.div_ceil(16);
    let grid = SpectralGrid::gauss_panels(lo, hi, panels, 16)?;
    let values = grid
        .lambdas()
        .iter()
        .map(|&l| Ok(Complex64::new(spec.spectrum_value(l)?, 0.0)))
        .collect::<Result<Vec<_>>>()?;
    Spectrum::new(grid, values)
}

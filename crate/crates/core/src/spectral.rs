//! Frequency-side analysis: the Harish-Chandra c-function and Plancherel
//! density, quadrature grids, the spherical Fourier transform and its
//! inverse, Sobolev norms, the high-frequency multiplier linking spectra on
//! the space with Euclidean radial spectra, and the Euclidean radial
//! (normalized-Bessel) transform.
//!
//! The inversion constant of the spherical transform depends only on
//! `(m_v, m_z)` but its closed form is not used here; it is calibrated once
//! per space by requiring Plancherel equality on a reference Gaussian bump,
//! which makes the round-trip identities exact by construction and is itself
//! exercised by the tests.

use crate::error::{Error, Result};
use crate::numerics::quad::composite_gauss;
use crate::specfun::{density, log_gamma_complex, script_j, BesselOrder, SpaceParams};
use crate::spherical::SphericalEvaluator;
use num_complex::Complex64;
use std::io::{self, Write};

// ---------------------------------------------------------------------------
// c-function and Plancherel density
// ---------------------------------------------------------------------------

/// Harish-Chandra c-function
/// `c(lambda) = 2^(Q-2i*lambda) Gamma(2i*lambda) / Gamma((Q+2i*lambda)/2)
///  * Gamma(n/2) / Gamma((m_v + 4i*lambda + 2)/4)`,
/// evaluated through log-Gamma so the Gamma growth cancels before
/// exponentiation. On the space `(0, 2)` the duplication formula collapses
/// this to `1/(i*lambda)`.
pub fn c_function(space: SpaceParams, lambda: f64) -> Result<Complex64> {
    if !lambda.is_finite() {
        return Err(Error::Domain(format!("non-finite frequency {lambda}")));
    }
    if lambda == 0.0 {
        return Err(Error::Pole("c-function pole at lambda = 0".into()));
    }
    let q = space.q();
    let n = space.n() as f64;
    let two_i_lambda = Complex64::new(0.0, 2.0 * lambda);
    let log_c = Complex64::new(q, -2.0 * lambda) * 2.0f64.ln() + log_gamma_complex(two_i_lambda)?
        - log_gamma_complex((two_i_lambda + q) / 2.0)?
        + log_gamma_complex(Complex64::new(n / 2.0, 0.0))?
        - log_gamma_complex(Complex64::new((space.m_v() as f64 + 2.0) / 4.0, lambda))?;
    Ok(log_c.exp())
}

/// Plancherel density `|c(lambda)|^{-2}`, extended by 0 at `lambda = 0`
/// (it vanishes quadratically there). Comparable with
/// `lambda^2 (1 + |lambda|)^{n-3}` on any fixed frequency window.
pub fn plancherel_density(space: SpaceParams, lambda: f64) -> Result<f64> {
    if !lambda.is_finite() {
        return Err(Error::Domain(format!("non-finite frequency {lambda}")));
    }
    if lambda == 0.0 {
        return Ok(0.0);
    }
    let c = c_function(space, lambda)?;
    Ok(1.0 / c.norm_sqr())
}

// ---------------------------------------------------------------------------
// Grids
// ---------------------------------------------------------------------------

const NODES_PER_PANEL: usize = 16;
const NODES_PER_PERIOD: f64 = 10.0;

fn oscillation_panels(lo: f64, hi: f64, conjugate_extent: f64) -> usize {
    let periods = (hi - lo) * conjugate_extent / (2.0 * std::f64::consts::PI);
    let nodes = (NODES_PER_PERIOD * periods).ceil().max(64.0) as usize;
    nodes.div_ceil(NODES_PER_PANEL)
}

/// Positive frequency grid with quadrature weights for `d lambda` over the
/// covered interval `[lo, lambda_max]`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralGrid {
    lambdas: Vec<f64>,
    weights: Vec<f64>,
    lambda_lo: f64,
    lambda_max: f64,
}

/// Positive radius grid with quadrature weights for `ds` over
/// `[lo, s_max]`.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialGrid {
    radii: Vec<f64>,
    weights: Vec<f64>,
    s_lo: f64,
    s_max: f64,
}

fn check_grid(nodes: &[f64], weights: &[f64], lo: f64, hi: f64, what: &str) -> Result<()> {
    if nodes.is_empty() || nodes.len() != weights.len() {
        return Err(Error::Argument(format!("{what}: empty or mismatched grid")));
    }
    if !(lo >= 0.0 && hi > lo && hi.is_finite()) {
        return Err(Error::Argument(format!(
            "{what}: invalid interval [{lo}, {hi}]"
        )));
    }
    if nodes.iter().any(|x| !x.is_finite() || *x <= 0.0) {
        return Err(Error::Argument(format!("{what}: nodes must be positive")));
    }
    if nodes.windows(2).any(|p| p[1] <= p[0]) {
        return Err(Error::Argument(format!("{what}: nodes must be ascending")));
    }
    if weights.iter().any(|w| !w.is_finite() || *w <= 0.0) {
        return Err(Error::Argument(format!("{what}: weights must be positive")));
    }
    let sum: f64 = weights.iter().sum();
    if (sum - (hi - lo)).abs() > 1e-10 * (hi - lo).max(1.0) {
        return Err(Error::Argument(format!(
            "{what}: weights sum to {sum}, expected {}",
            hi - lo
        )));
    }
    Ok(())
}

impl SpectralGrid {
    /// Composite Gauss-Legendre grid on `[lo, hi]`.
    pub fn gauss_panels(lo: f64, hi: f64, panels: usize, per_panel: usize) -> Result<Self> {
        if !(hi > lo && lo >= 0.0) || panels == 0 || per_panel == 0 {
            return Err(Error::Argument(format!(
                "invalid spectral panel layout [{lo}, {hi}] x {panels} x {per_panel}"
            )));
        }
        let (lambdas, weights) = composite_gauss(lo, hi, panels, per_panel);
        Ok(Self {
            lambdas,
            weights,
            lambda_lo: lo,
            lambda_max: hi,
        })
    }

    /// Grid sized for integrands that oscillate like `e^(i lambda s)` with
    /// `s` up to `radial_extent` (at least ten nodes per period, floor of 64
    /// nodes).
    pub fn for_oscillation(lo: f64, hi: f64, radial_extent: f64) -> Result<Self> {
        Self::gauss_panels(
            lo,
            hi,
            oscillation_panels(lo, hi, radial_extent),
            NODES_PER_PANEL,
        )
    }

    pub fn from_nodes(lambdas: Vec<f64>, weights: Vec<f64>, lo: f64, hi: f64) -> Result<Self> {
        check_grid(&lambdas, &weights, lo, hi, "spectral grid")?;
        Ok(Self {
            lambdas,
            weights,
            lambda_lo: lo,
            lambda_max: hi,
        })
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn lambda_lo(&self) -> f64 {
        self.lambda_lo
    }

    pub fn lambda_max(&self) -> f64 {
        self.lambda_max
    }

    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }
}

impl RadialGrid {
    pub fn gauss_panels(lo: f64, hi: f64, panels: usize, per_panel: usize) -> Result<Self> {
        if !(hi > lo && lo >= 0.0) || panels == 0 || per_panel == 0 {
            return Err(Error::Argument(format!(
                "invalid radial panel layout [{lo}, {hi}] x {panels} x {per_panel}"
            )));
        }
        let (radii, weights) = composite_gauss(lo, hi, panels, per_panel);
        Ok(Self {
            radii,
            weights,
            s_lo: lo,
            s_max: hi,
        })
    }

    /// Grid sized against oscillation `e^(i lambda s)` with `lambda` up to
    /// `spectral_extent`.
    pub fn for_oscillation(lo: f64, hi: f64, spectral_extent: f64) -> Result<Self> {
        Self::gauss_panels(
            lo,
            hi,
            oscillation_panels(lo, hi, spectral_extent),
            NODES_PER_PANEL,
        )
    }

    pub fn from_nodes(radii: Vec<f64>, weights: Vec<f64>, lo: f64, hi: f64) -> Result<Self> {
        check_grid(&radii, &weights, lo, hi, "radial grid")?;
        Ok(Self {
            radii,
            weights,
            s_lo: lo,
            s_max: hi,
        })
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn s_lo(&self) -> f64 {
        self.s_lo
    }

    pub fn s_max(&self) -> f64 {
        self.s_max
    }

    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }
}

// ---------------------------------------------------------------------------
// Sampled data
// ---------------------------------------------------------------------------

/// Sampled spherical Fourier data `f^(lambda)` on a frequency grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    pub grid: SpectralGrid,
    pub values: Vec<Complex64>,
}

/// Sampled radial function `f(s)` on a geodesic-radius grid.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialProfile {
    pub grid: RadialGrid,
    pub values: Vec<Complex64>,
}

fn check_values(len: usize, values: &[Complex64], what: &str) -> Result<()> {
    if values.len() != len {
        return Err(Error::Argument(format!(
            "{what}: {} values on a {len}-node grid",
            values.len()
        )));
    }
    if values
        .iter()
        .any(|v| !v.re.is_finite() || !v.im.is_finite())
    {
        return Err(Error::Argument(format!("{what}: non-finite value")));
    }
    Ok(())
}

impl Spectrum {
    pub fn new(grid: SpectralGrid, values: Vec<Complex64>) -> Result<Self> {
        check_values(grid.len(), &values, "spectrum")?;
        Ok(Self { grid, values })
    }

    /// Samples a scalar function of frequency on the grid.
    pub fn sample<F: Fn(f64) -> Complex64>(grid: SpectralGrid, f: F) -> Result<Self> {
        let values = grid.lambdas.iter().map(|&l| f(l)).collect();
        Self::new(grid, values)
    }
}

impl RadialProfile {
    pub fn new(grid: RadialGrid, values: Vec<Complex64>) -> Result<Self> {
        check_values(grid.len(), &values, "radial profile")?;
        Ok(Self { grid, values })
    }

    pub fn sample<F: Fn(f64) -> Complex64>(grid: RadialGrid, f: F) -> Result<Self> {
        let values = grid.radii.iter().map(|&s| f(s)).collect();
        Self::new(grid, values)
    }
}

/// Weighted L^2 norm of values on a radial grid,
/// `(sum |v_i|^2 A(s_i) w_i)^(1/2)`.
pub fn radial_l2_norm(space: SpaceParams, grid: &RadialGrid, values: &[Complex64]) -> Result<f64> {
    check_values(grid.len(), values, "radial values")?;
    let mut acc = 0.0;
    for ((v, &s), &w) in values.iter().zip(grid.radii()).zip(grid.weights()) {
        acc += v.norm_sqr() * density(space, s)? * w;
    }
    Ok(acc.sqrt())
}

/// Plancherel-weighted spectral L^2 norm, `(sum |v_j|^2 |c|^-2 w_j)^(1/2)`.
pub fn spectral_l2_norm(space: SpaceParams, spectrum: &Spectrum) -> Result<f64> {
    let mut acc = 0.0;
    for ((v, &l), &w) in spectrum
        .values
        .iter()
        .zip(spectrum.grid.lambdas())
        .zip(spectrum.grid.weights())
    {
        acc += v.norm_sqr() * plancherel_density(space, l)? * w;
    }
    Ok(acc.sqrt())
}

// ---------------------------------------------------------------------------
// Sobolev norms
// ---------------------------------------------------------------------------

/// Regularity scale of the fractional Sobolev norm: inhomogeneous weights
/// `(lambda^2 + Q^2/4)^beta`, homogeneous weights `lambda^(2 beta)`.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SobolevKind {
    Inhomogeneous { beta: f64 },
    Homogeneous { beta: f64 },
}

impl SobolevKind {
    pub fn beta(&self) -> f64 {
        match self {
            SobolevKind::Inhomogeneous { beta } | SobolevKind::Homogeneous { beta } => *beta,
        }
    }
}

/// Sobolev norm of a spectrum. The homogeneous norm never exceeds the
/// inhomogeneous norm at the same `beta`.
pub fn sobolev_norm(space: SpaceParams, spectrum: &Spectrum, kind: SobolevKind) -> Result<f64> {
    let beta = kind.beta();
    if !(beta >= 0.0) {
        return Err(Error::Argument(format!("beta must be >= 0, got {beta}")));
    }
    let shift = space.q2_over_4();
    let mut acc = 0.0;
    for ((v, &l), &w) in spectrum
        .values
        .iter()
        .zip(spectrum.grid.lambdas())
        .zip(spectrum.grid.weights())
    {
        let weight = match kind {
            SobolevKind::Inhomogeneous { .. } => (l * l + shift).powf(beta),
            SobolevKind::Homogeneous { .. } => (l * l).powf(beta),
        };
        acc += weight * v.norm_sqr() * plancherel_density(space, l)? * w;
    }
    Ok(acc.sqrt())
}

// ---------------------------------------------------------------------------
// Spherical Fourier transform
// ---------------------------------------------------------------------------

/// Spherical Fourier transform pair on a fixed space. Holds the calibrated
/// inversion constant once [`Transform::calibrate`] has run; the inverse
/// transform refuses to run before that.
#[derive(Clone, Copy, Debug)]
pub struct Transform<'a> {
    evaluator: &'a SphericalEvaluator,
    c_inv: Option<f64>,
}

impl<'a> Transform<'a> {
    pub fn new(evaluator: &'a SphericalEvaluator) -> Self {
        Self {
            evaluator,
            c_inv: None,
        }
    }

    /// Builds the pair with a known inversion constant (e.g. reusing a
    /// previous calibration of the same space).
    pub fn with_inversion_constant(evaluator: &'a SphericalEvaluator, c_inv: f64) -> Self {
        Self {
            evaluator,
            c_inv: Some(c_inv),
        }
    }

    pub fn space(&self) -> SpaceParams {
        self.evaluator.space()
    }

    pub fn evaluator(&self) -> &SphericalEvaluator {
        self.evaluator
    }

    pub fn inversion_constant(&self) -> Option<f64> {
        self.c_inv
    }

    /// Forward transform: `f^(lambda_j) = sum_i f(s_i) phi_j(s_i) A(s_i) w_i`.
    ///
    /// The caller is responsible for the profile decaying fast enough that
    /// the truncated integral converges on the supplied grid.
    pub fn sft(&self, profile: &RadialProfile, grid: &SpectralGrid) -> Result<Spectrum> {
        check_values(profile.grid.len(), &profile.values, "profile")?;
        let space = self.space();
        let table = self
            .evaluator
            .phi_table(grid.lambdas(), profile.grid.radii())?;
        let mut spatial_weight = Vec::with_capacity(profile.grid.len());
        for (&s, &w) in profile.grid.radii().iter().zip(profile.grid.weights()) {
            spatial_weight.push(density(space, s)? * w);
        }
        let values: Vec<Complex64> = (0..grid.len())
            .map(|j| {
                let row = table.row(j);
                let mut acc = Complex64::new(0.0, 0.0);
                for ((v, phi), aw) in profile.values.iter().zip(row).zip(&spatial_weight) {
                    acc += v * phi * aw;
                }
                acc
            })
            .collect();
        Spectrum::new(grid.clone(), values)
    }

    /// Inverse transform:
    /// `f(s_i) = C_inv sum_j f^(lambda_j) phi_j(s_i) |c|^-2 w_j`.
    pub fn isft(&self, spectrum: &Spectrum, grid: &RadialGrid) -> Result<RadialProfile> {
        let c_inv = self.c_inv.ok_or_else(|| {
            Error::Uncalibrated(format!(
                "space (m_v={}, m_z={}) has no inversion constant; run calibrate() first",
                self.space().m_v(),
                self.space().m_z()
            ))
        })?;
        let space = self.space();
        let table = self
            .evaluator
            .phi_table(spectrum.grid.lambdas(), grid.radii())?;
        // weight expression kept identical to the propagator's so that
        // propagation at t = 0 reproduces this path bit-for-bit
        let mut coeffs = Vec::with_capacity(spectrum.grid.len());
        for ((v, &l), &w) in spectrum
            .values
            .iter()
            .zip(spectrum.grid.lambdas())
            .zip(spectrum.grid.weights())
        {
            coeffs.push(v * (plancherel_density(space, l)? * w * c_inv));
        }
        RadialProfile::new(grid.clone(), table.synthesize(&coeffs))
    }

    /// Calibrates the inversion constant by Plancherel equality on a
    /// reference Gaussian bump, stores it, and returns it.
    pub fn calibrate(&mut self) -> Result<f64> {
        let radial = RadialGrid::for_oscillation(0.0, CAL_S_MAX, CAL_LAMBDA_MAX)?;
        let spectral = SpectralGrid::for_oscillation(0.0, CAL_LAMBDA_MAX, CAL_S_MAX)?;
        let bump = RadialProfile::sample(radial, |s| Complex64::new((-s * s).exp(), 0.0))?;
        let spectrum = self.sft(&bump, &spectral)?;
        let spatial = radial_l2_norm(self.space(), &bump.grid, &bump.values)?;
        let spectral_norm = spectral_l2_norm(self.space(), &spectrum)?;
        if !(spectral_norm > 0.0) {
            return Err(Error::Numerical(
                "calibration bump produced an empty spectrum".into(),
            ));
        }
        let c_inv = (spatial / spectral_norm).powi(2);
        self.c_inv = Some(c_inv);
        Ok(c_inv)
    }
}

const CAL_S_MAX: f64 = 12.0;
const CAL_LAMBDA_MAX: f64 = 16.0;

// ---------------------------------------------------------------------------
// High-frequency multiplier (Schwartz correspondence, frequency side)
// ---------------------------------------------------------------------------

/// Direction of the frequency-side correspondence multiplier.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MultiplierDirection {
    /// Multiply by `|c(lambda)|^-2 / lambda^(n-1)`: spectrum on the space to
    /// Euclidean radial spectrum.
    Forward,
    /// Multiply by the exact pointwise reciprocal.
    Inverse,
}

/// Applies the correspondence multiplier `|c|^-2 / lambda^(n-1)` (or its
/// reciprocal) pointwise; `Inverse` after `Forward` is the identity exactly.
///
/// The forward direction requires the spectrum to be supported away from the
/// origin: if the grid covers the origin and the value at its first node is
/// nonzero, the support touches 0 and the correspondence does not apply.
pub fn schwartz_multiplier(
    space: SpaceParams,
    spectrum: &Spectrum,
    direction: MultiplierDirection,
) -> Result<Spectrum> {
    if direction == MultiplierDirection::Forward
        && spectrum.grid.lambda_lo() < 1e-12
        && spectrum.values[0].norm() > 0.0
    {
        return Err(Error::Precondition(
            "forward multiplier requires spectral support away from lambda = 0".into(),
        ));
    }
    let n = space.n() as i32;
    let values = spectrum
        .values
        .iter()
        .zip(spectrum.grid.lambdas())
        .map(|(v, &l)| {
            let m = plancherel_density(space, l)? / l.powi(n - 1);
            Ok(match direction {
                MultiplierDirection::Forward => v * m,
                MultiplierDirection::Inverse => v / m,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Spectrum::new(spectrum.grid.clone(), values)
}

// ---------------------------------------------------------------------------
// Euclidean radial transform
// ---------------------------------------------------------------------------

/// Radial Fourier transform on `R^n`,
/// `F f(lambda) = integral of f(r) script_j((n-2)/2, lambda r) r^(n-1) dr`,
/// self-inverse up to a dimensional constant calibrated once per `n`.
#[derive(Clone, Copy, Debug)]
pub struct EuclidTransform {
    n: u32,
    c_inv: f64,
}

impl EuclidTransform {
    pub fn new(n: u32) -> Result<Self> {
        if n < 2 {
            return Err(Error::Argument(format!("dimension must be >= 2, got {n}")));
        }
        let mut t = Self { n, c_inv: 1.0 };
        let radial = RadialGrid::for_oscillation(0.0, 10.0, 14.0)?;
        let spectral = SpectralGrid::for_oscillation(0.0, 14.0, 10.0)?;
        let bump = RadialProfile::sample(radial, |r| Complex64::new((-r * r).exp(), 0.0))?;
        let spectrum = t.forward(&bump, &spectral)?;
        let spatial: f64 = bump
            .values
            .iter()
            .zip(bump.grid.radii())
            .zip(bump.grid.weights())
            .map(|((v, &r), &w)| v.norm_sqr() * r.powi(n as i32 - 1) * w)
            .sum();
        let freq: f64 = spectrum
            .values
            .iter()
            .zip(spectrum.grid.lambdas())
            .zip(spectrum.grid.weights())
            .map(|((v, &l), &w)| v.norm_sqr() * l.powi(n as i32 - 1) * w)
            .sum();
        t.c_inv = spatial / freq;
        Ok(t)
    }

    pub fn dimension(&self) -> u32 {
        self.n
    }

    /// The calibrated inversion constant (closed form `1/(2^(n-2) Gamma(n/2)^2)`).
    pub fn inversion_constant(&self) -> f64 {
        self.c_inv
    }

    fn kernel(&self, lambda: f64, r: f64) -> f64 {
        script_j(BesselOrder::from_twice(self.n - 2), lambda * r)
    }

    pub fn forward(&self, profile: &RadialProfile, grid: &SpectralGrid) -> Result<Spectrum> {
        check_values(profile.grid.len(), &profile.values, "profile")?;
        let p = self.n as i32 - 1;
        let values: Vec<Complex64> = grid
            .lambdas()
            .iter()
            .map(|&l| {
                let mut acc = Complex64::new(0.0, 0.0);
                for ((v, &r), &w) in profile
                    .values
                    .iter()
                    .zip(profile.grid.radii())
                    .zip(profile.grid.weights())
                {
                    acc += v * self.kernel(l, r) * r.powi(p) * w;
                }
                acc
            })
            .collect();
        Spectrum::new(grid.clone(), values)
    }

    pub fn inverse(&self, spectrum: &Spectrum, grid: &RadialGrid) -> Result<RadialProfile> {
        check_values(spectrum.grid.len(), &spectrum.values, "spectrum")?;
        let p = self.n as i32 - 1;
        let values: Vec<Complex64> = grid
            .radii()
            .iter()
            .map(|&r| {
                let mut acc = Complex64::new(0.0, 0.0);
                for ((v, &l), &w) in spectrum
                    .values
                    .iter()
                    .zip(spectrum.grid.lambdas())
                    .zip(spectrum.grid.weights())
                {
                    acc += v * self.kernel(l, r) * l.powi(p) * w;
                }
                acc * self.c_inv
            })
            .collect();
        RadialProfile::new(grid.clone(), values)
    }
}

// ---------------------------------------------------------------------------
// CSV serialization
// ---------------------------------------------------------------------------

fn write_csv_rows<W: Write>(
    out: &mut W,
    nodes: &[f64],
    values: &[Complex64],
    weights: &[f64],
) -> io::Result<()> {
    out.write_all(b"node,value_re,value_im,weight\n")?;
    for ((x, v), w) in nodes.iter().zip(values).zip(weights) {
        writeln!(out, "{:.16e},{:.16e},{:.16e},{:.16e}", x, v.re, v.im, w)?;
    }
    Ok(())
}

/// Writes a spectrum as CSV: header row, columns `(node, value_re, value_im,
/// weight)`, 17 significant digits, LF line endings.
pub fn write_spectrum_csv<W: Write>(out: &mut W, spectrum: &Spectrum) -> io::Result<()> {
    write_csv_rows(
        out,
        spectrum.grid.lambdas(),
        &spectrum.values,
        spectrum.grid.weights(),
    )
}

/// Writes a radial profile as CSV in the same layout.
pub fn write_profile_csv<W: Write>(out: &mut W, profile: &RadialProfile) -> io::Result<()> {
    write_csv_rows(
        out,
        profile.grid.radii(),
        &profile.values,
        profile.grid.weights(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::quad::adaptive_simpson;
    use crate::specfun::gamma_real;

    fn h3() -> SpaceParams {
        SpaceParams::hyperbolic3()
    }

    #[test]
    fn c_function_h3_closed_form() {
        for k in 0..=60 {
            let lambda = 0.1 * 1.122f64.powi(k);
            let c = c_function(h3(), lambda).unwrap();
            let expected = Complex64::new(0.0, -1.0 / lambda);
            assert!((c - expected).norm() < 1e-10, "lambda = {lambda}");
        }
    }

    #[test]
    fn c_function_conjugate_symmetry() {
        for space in [
            h3(),
            SpaceParams::new(2, 1).unwrap(),
            SpaceParams::new(4, 3).unwrap(),
        ] {
            for &lambda in &[0.05, 0.8, 3.0, 42.0] {
                let plus = c_function(space, lambda).unwrap();
                let minus = c_function(space, -lambda).unwrap();
                assert!((minus - plus.conj()).norm() < 1e-10 * plus.norm());
            }
        }
    }

    #[test]
    fn c_function_small_lambda_magnitude() {
        let c = c_function(h3(), 0.001).unwrap();
        assert!((c.norm() - 1000.0).abs() < 1e-6 * 1000.0);
        assert!(matches!(c_function(h3(), 0.0), Err(Error::Pole(_))));
    }

    #[test]
    fn plancherel_density_values() {
        assert!((plancherel_density(h3(), 2.0).unwrap() - 4.0).abs() < 1e-10);
        assert_eq!(plancherel_density(h3(), 0.0).unwrap(), 0.0);
    }

    #[test]
    fn plancherel_density_comparable_to_power_envelope() {
        // |c|^-2 / (lambda^2 (1+lambda)^(n-3)) bounded above and below, with
        // the fitted bound stable under grid refinement
        for space in [
            SpaceParams::new(2, 1).unwrap(),
            SpaceParams::new(4, 3).unwrap(),
        ] {
            let n = space.n() as f64;
            let fit = |points: usize| {
                let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
                for k in 0..=points {
                    let l = 0.01 * (100.0f64 / 0.01).powf(k as f64 / points as f64);
                    let ratio =
                        plancherel_density(space, l).unwrap() / (l * l * (1.0 + l).powf(n - 3.0));
                    lo = lo.min(ratio);
                    hi = hi.max(ratio);
                }
                (lo, hi)
            };
            let (lo1, hi1) = fit(200);
            let (lo2, hi2) = fit(400);
            assert!(lo1 > 0.0 && hi1.is_finite());
            assert!((hi2 - hi1).abs() <= 0.1 * hi1);
            assert!((lo2 - lo1).abs() <= 0.1 * lo1);
        }
    }

    #[test]
    fn grid_invariants() {
        let g = SpectralGrid::for_oscillation(0.0, 16.0, 12.0).unwrap();
        assert!(g.lambdas().windows(2).all(|p| p[1] > p[0]));
        assert!(g.lambdas().iter().all(|&l| l > 0.0));
        let sum: f64 = g.weights().iter().sum();
        assert!((sum - 16.0).abs() < 1e-10);
        assert!(g.len() >= 64);
        assert!(SpectralGrid::gauss_panels(2.0, 1.0, 4, 4).is_err());
        assert!(SpectralGrid::from_nodes(vec![1.0, 0.5], vec![0.1, 0.1], 0.0, 1.0).is_err());
    }

    #[test]
    fn sft_of_zero_is_zero() {
        let ev = SphericalEvaluator::new(h3());
        let t = Transform::new(&ev);
        let radial = RadialGrid::gauss_panels(0.0, 2.0, 4, 8).unwrap();
        let zero = RadialProfile::sample(radial, |_| Complex64::new(0.0, 0.0)).unwrap();
        let grid = SpectralGrid::gauss_panels(0.0, 4.0, 4, 8).unwrap();
        let spec = t.sft(&zero, &grid).unwrap();
        assert!(spec.values.iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn sft_of_point_mass_is_flat() {
        // unit profile supported on a tiny ball: f^ ~ mass for every lambda
        let ev = SphericalEvaluator::new(h3());
        let t = Transform::new(&ev);
        let radial = RadialGrid::gauss_panels(0.0, 0.01, 4, 8).unwrap();
        let one = RadialProfile::sample(radial.clone(), |_| Complex64::new(1.0, 0.0)).unwrap();
        let mass: f64 = radial
            .radii()
            .iter()
            .zip(radial.weights())
            .map(|(&s, &w)| density(h3(), s).unwrap() * w)
            .sum();
        let grid = SpectralGrid::gauss_panels(0.0, 4.0, 4, 8).unwrap();
        let spec = t.sft(&one, &grid).unwrap();
        // flat up to the O(kappa s^2) curvature of phi on the tiny ball
        for (v, &l) in spec.values.iter().zip(grid.lambdas()) {
            assert!((v.re / mass - 1.0).abs() < 1e-3, "lambda = {l}");
            assert!(v.im.abs() < 1e-12 * mass);
        }
    }

    #[test]
    fn calibrated_roundtrip_on_h3() {
        let ev = SphericalEvaluator::new(h3());
        let mut t = Transform::new(&ev);
        let c_inv = t.calibrate().unwrap();
        // 2/pi is the closed-form inversion constant in this normalization
        assert!(
            (c_inv - 2.0 / std::f64::consts::PI).abs() < 1e-8,
            "c_inv = {c_inv}"
        );
        let radial = RadialGrid::for_oscillation(0.0, 12.0, 16.0).unwrap();
        let spectral = SpectralGrid::for_oscillation(0.0, 16.0, 12.0).unwrap();
        let bump = RadialProfile::sample(radial.clone(), |s| {
            Complex64::new(s * s * (-s * s).exp(), 0.0)
        })
        .unwrap();
        let round = t.isft(&t.sft(&bump, &spectral).unwrap(), &radial).unwrap();
        let peak = bump.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        for (a, b) in round.values.iter().zip(&bump.values) {
            assert!((a - b).norm() < 1e-7 * peak);
        }
    }

    #[test]
    fn isft_requires_calibration() {
        let ev = SphericalEvaluator::new(h3());
        let t = Transform::new(&ev);
        let grid = SpectralGrid::gauss_panels(0.0, 2.0, 2, 8).unwrap();
        let spec = Spectrum::sample(grid, |_| Complex64::new(1.0, 0.0)).unwrap();
        let radial = RadialGrid::gauss_panels(0.0, 1.0, 2, 8).unwrap();
        assert!(matches!(
            t.isft(&spec, &radial),
            Err(Error::Uncalibrated(_))
        ));
    }

    #[test]
    fn narrow_spectral_bump_reproduces_single_mode() {
        let ev = SphericalEvaluator::new(h3());
        let mut t = Transform::new(&ev);
        let c_inv = t.calibrate().unwrap();
        let (l0, half_width) = (2.0, 1e-3);
        let grid = SpectralGrid::gauss_panels(l0 - half_width, l0 + half_width, 2, 8).unwrap();
        let spec = Spectrum::sample(grid, |_| Complex64::new(1.0, 0.0)).unwrap();
        let radial = RadialGrid::gauss_panels(0.0, 3.0, 6, 8).unwrap();
        let prof = t.isft(&spec, &radial).unwrap();
        for (v, &s) in prof.values.iter().zip(radial.radii()) {
            let expected = c_inv
                * ((l0 * s).sin() / (l0 * s.sinh()))
                * plancherel_density(h3(), l0).unwrap()
                * 2.0
                * half_width;
            assert!(
                (v.re - expected).abs() < 1e-4 * expected.abs().max(1e-6),
                "s = {s}"
            );
        }
    }

    #[test]
    fn sobolev_norm_relations() {
        let space = SpaceParams::new(2, 1).unwrap();
        let grid = SpectralGrid::gauss_panels(0.5, 8.0, 8, 8).unwrap();
        let spec =
            Spectrum::sample(grid, |l| Complex64::new((-(l - 3.0).powi(2)).exp(), 0.0)).unwrap();
        let l2 = spectral_l2_norm(space, &spec).unwrap();
        let hom0 = sobolev_norm(space, &spec, SobolevKind::Homogeneous { beta: 0.0 }).unwrap();
        assert!((l2 - hom0).abs() < 1e-14 * l2);
        for &beta in &[0.1, 0.5, 1.3] {
            let hom = sobolev_norm(space, &spec, SobolevKind::Homogeneous { beta }).unwrap();
            let inhom = sobolev_norm(space, &spec, SobolevKind::Inhomogeneous { beta }).unwrap();
            assert!(hom <= inhom);
        }
        assert!(sobolev_norm(space, &spec, SobolevKind::Homogeneous { beta: -0.1 }).is_err());
    }

    #[test]
    fn sobolev_monotone_in_beta_for_high_frequency_support() {
        let space = h3();
        let grid = SpectralGrid::gauss_panels(1.0, 6.0, 6, 8).unwrap();
        let spec =
            Spectrum::sample(grid, |l| Complex64::new((-(l - 3.0).powi(2)).exp(), 0.0)).unwrap();
        let mut prev = 0.0;
        for k in 0..6 {
            let beta = 0.3 * k as f64;
            let v = sobolev_norm(space, &spec, SobolevKind::Homogeneous { beta }).unwrap();
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn multiplier_is_identity_on_h3_and_inverts_to_ulp() {
        let space = h3();
        let grid = SpectralGrid::gauss_panels(1.0, 2.0, 2, 8).unwrap();
        let spec = Spectrum::sample(grid, |l| Complex64::new((l - 1.5).cos(), 0.3)).unwrap();
        let fwd = schwartz_multiplier(space, &spec, MultiplierDirection::Forward).unwrap();
        for (a, b) in fwd.values.iter().zip(&spec.values) {
            assert!((a - b).norm() < 1e-10 * b.norm().max(1e-10));
        }
        // inverse divides by the same multiplier values: exact up to one
        // rounding each way
        for space in [
            h3(),
            SpaceParams::new(2, 1).unwrap(),
            SpaceParams::new(4, 3).unwrap(),
        ] {
            let fwd = schwartz_multiplier(space, &spec, MultiplierDirection::Forward).unwrap();
            let back = schwartz_multiplier(space, &fwd, MultiplierDirection::Inverse).unwrap();
            for (a, b) in back.values.iter().zip(&spec.values) {
                assert!((a - b).norm() <= 4.0 * f64::EPSILON * b.norm());
            }
        }
    }

    #[test]
    fn multiplier_rejects_support_touching_origin() {
        let space = SpaceParams::new(2, 1).unwrap();
        let grid = SpectralGrid::gauss_panels(0.0, 2.0, 2, 8).unwrap();
        let flat = Spectrum::sample(grid, |_| Complex64::new(1.0, 0.0)).unwrap();
        assert!(matches!(
            schwartz_multiplier(space, &flat, MultiplierDirection::Forward),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn multiplier_sobolev_norms_comparable() {
        // the Euclidean-side homogeneous norm of the forward image and the
        // space-side norm differ by a weighted average of the multiplier, so
        // their squared ratio lies between its extremes over the support
        let space = SpaceParams::new(2, 1).unwrap();
        let n = space.n() as i32;
        let beta = 0.4;
        let grid = SpectralGrid::gauss_panels(1.0, 5.0, 6, 16).unwrap();
        let spec = Spectrum::sample(grid, |l| {
            Complex64::new((-(l - 3.0).powi(2) * 2.0).exp(), 0.0)
        })
        .unwrap();
        let image = schwartz_multiplier(space, &spec, MultiplierDirection::Forward).unwrap();
        let euclid_sq: f64 = image
            .values
            .iter()
            .zip(image.grid.lambdas())
            .zip(image.grid.weights())
            .map(|((v, &l), &w)| l.powf(2.0 * beta) * v.norm_sqr() * l.powi(n - 1) * w)
            .sum();
        let space_norm = sobolev_norm(space, &spec, SobolevKind::Homogeneous { beta }).unwrap();
        let ratio_sq = euclid_sq / (space_norm * space_norm);
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for &l in spec.grid.lambdas() {
            let m = plancherel_density(space, l).unwrap() / l.powi(n - 1);
            lo = lo.min(m);
            hi = hi.max(m);
        }
        assert!(
            lo <= ratio_sq && ratio_sq <= hi,
            "ratio^2 = {ratio_sq}, envelope [{lo}, {hi}]"
        );
    }

    #[test]
    fn euclid_spectrum_scaling_covariance() {
        // F f(lambda) = R^n F f_R(R lambda) with f_R(x) = f(Rx), realized on
        // the matching scaled grid; exact for the discrete transform
        let t = EuclidTransform::new(3).unwrap();
        let f = |r: f64| (-r * r).exp();
        let big_r = 2.5;
        let radial = RadialGrid::for_oscillation(0.0, 10.0, 12.0).unwrap();
        let profile = RadialProfile::sample(radial.clone(), |r| Complex64::new(f(r), 0.0)).unwrap();
        let scaled_radii: Vec<f64> = radial.radii().iter().map(|r| r / big_r).collect();
        let scaled_weights: Vec<f64> = radial.weights().iter().map(|w| w / big_r).collect();
        let scaled =
            RadialGrid::from_nodes(scaled_radii, scaled_weights, 0.0, radial.s_max() / big_r)
                .unwrap();
        let profile_r =
            RadialProfile::sample(scaled, |rho| Complex64::new(f(big_r * rho), 0.0)).unwrap();
        let lambdas = SpectralGrid::gauss_panels(0.5, 4.0, 4, 8).unwrap();
        let scaled_lambdas = SpectralGrid::gauss_panels(0.5 * big_r, 4.0 * big_r, 4, 8).unwrap();
        let lhs = t.forward(&profile, &lambdas).unwrap();
        let rhs = t.forward(&profile_r, &scaled_lambdas).unwrap();
        for (a, b) in lhs.values.iter().zip(&rhs.values) {
            let scaled_back = b * big_r.powi(3);
            assert!((a - scaled_back).norm() < 1e-12 * a.norm().max(1e-12));
        }
    }

    #[test]
    fn euclid_constant_matches_closed_form() {
        for n in [2u32, 3, 4, 8] {
            let t = EuclidTransform::new(n).unwrap();
            let expected =
                1.0 / (2f64.powi(n as i32 - 2) * gamma_real(n as f64 / 2.0).unwrap().powi(2));
            assert!(
                (t.inversion_constant() - expected).abs() < 1e-8 * expected,
                "n = {n}: {} vs {expected}",
                t.inversion_constant()
            );
        }
    }

    #[test]
    fn euclid_roundtrip_and_zero() {
        let t = EuclidTransform::new(3).unwrap();
        let radial = RadialGrid::for_oscillation(0.0, 10.0, 14.0).unwrap();
        let spectral = SpectralGrid::for_oscillation(0.0, 14.0, 10.0).unwrap();
        let bump = RadialProfile::sample(radial.clone(), |r| {
            Complex64::new((1.0 + r * r) * (-r * r).exp(), 0.0)
        })
        .unwrap();
        let round = t
            .inverse(&t.forward(&bump, &spectral).unwrap(), &radial)
            .unwrap();
        for (a, b) in round.values.iter().zip(&bump.values) {
            assert!((a - b).norm() < 1e-8);
        }
        let zero = RadialProfile::sample(radial.clone(), |_| Complex64::new(0.0, 0.0)).unwrap();
        let z = t.forward(&zero, &spectral).unwrap();
        assert!(z.values.iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn euclid_n3_matches_sine_transform_oracle() {
        // independent oracle: F f(lambda) = (1/lambda) * int f(r) sin(lambda r) r dr
        // by adaptive Simpson
        let t = EuclidTransform::new(3).unwrap();
        let radial = RadialGrid::for_oscillation(0.0, 10.0, 6.0).unwrap();
        let f = |r: f64| (-(r - 2.0) * (r - 2.0) * 4.0).exp();
        let profile = RadialProfile::sample(radial, |r| Complex64::new(f(r), 0.0)).unwrap();
        let spectral = SpectralGrid::gauss_panels(0.5, 5.0, 6, 8).unwrap();
        let spec = t.forward(&profile, &spectral).unwrap();
        for (v, &l) in spec.values.iter().zip(spectral.lambdas()).step_by(7) {
            let oracle = adaptive_simpson(&|r: f64| f(r) * (l * r).sin() * r, 0.0, 10.0, 1e-12) / l;
            assert!((v.re - oracle).abs() < 1e-9, "lambda = {l}");
        }
    }

    #[test]
    fn csv_layout_is_stable() {
        let grid = SpectralGrid::from_nodes(vec![1.0, 2.0], vec![0.5, 0.5], 0.75, 1.75).unwrap();
        let spec = Spectrum::new(
            grid,
            vec![Complex64::new(0.5, -1.0), Complex64::new(2.0, 0.0)],
        )
        .unwrap();
        let mut buf = Vec::new();
        write_spectrum_csv(&mut buf, &spec).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let expected = "node,value_re,value_im,weight\n\
                        1.0000000000000000e0,5.0000000000000000e-1,-1.0000000000000000e0,5.0000000000000000e-1\n\
                        2.0000000000000000e0,2.0000000000000000e0,0.0000000000000000e0,5.0000000000000000e-1\n";
        assert_eq!(text, expected);
    }
}

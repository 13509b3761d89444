//! Dispersive propagators on the space and on `R^n`.
//!
//! The solution operator acts as the unimodular spectral multiplier
//! `e^{i t psi(lambda)}` against the inverse spherical transform:
//!
//! ```text
//! u(s, t) = C_inv * sum_j phi_j(s) e^{i t psi(lambda_j)} f^_j |c_j|^-2 w_j
//! ```
//!
//! A [`Propagator`] caches the `phi_{lambda_j}(s_i)` matrix once (the ODE
//! solves dominate runtime) and reuses it across times, which is what the
//! maximal function and the refinement studies need.

use crate::error::{Error, Result};
use crate::numerics::interp::MonotoneCubic;
use crate::specfun::{script_j, BesselOrder, SpaceParams};
use crate::spectral::{
    plancherel_density, EuclidTransform, RadialGrid, RadialProfile, SpectralGrid, Spectrum,
};
use crate::spherical::{PhiTable, SphericalEvaluator};
use num_complex::Complex64;

// ---------------------------------------------------------------------------
// Phases
// ---------------------------------------------------------------------------

/// A dispersive phase `psi(lambda)` with its degree `a`.
///
/// `PowerLaw` is `lambda^a`; `ShiftedPowerLaw` is `(lambda^2 + shift)^(a/2)`
/// (with `shift = Q^2/4` these are the two fractional-Schrodinger phases);
/// `Tabulated` interpolates sampled values with monotone cubics.
#[derive(Clone, Debug)]
pub enum Phase {
    PowerLaw { a: f64 },
    ShiftedPowerLaw { a: f64, shift: f64 },
    Tabulated { table: MonotoneCubic, a: f64 },
}

impl Phase {
    pub fn power_law(a: f64) -> Result<Self> {
        check_degree(a)?;
        Ok(Phase::PowerLaw { a })
    }

    /// The shifted power law `(lambda^2 + Q^2/4)^(a/2)` for the given space.
    pub fn shifted_power_law(a: f64, space: SpaceParams) -> Result<Self> {
        check_degree(a)?;
        Ok(Phase::ShiftedPowerLaw {
            a,
            shift: space.q2_over_4(),
        })
    }

    pub fn tabulated(nodes: Vec<f64>, values: Vec<f64>, a: f64) -> Result<Self> {
        check_degree(a)?;
        Ok(Phase::Tabulated {
            table: MonotoneCubic::new(nodes, values)?,
            a,
        })
    }

    /// The degree `a` with `psi(lambda) = lambda^a + O(1)`.
    pub fn degree(&self) -> f64 {
        match self {
            Phase::PowerLaw { a }
            | Phase::ShiftedPowerLaw { a, .. }
            | Phase::Tabulated { a, .. } => *a,
        }
    }

    pub fn eval(&self, lambda: f64) -> f64 {
        let l = lambda.abs();
        match self {
            Phase::PowerLaw { a } => l.powf(*a),
            Phase::ShiftedPowerLaw { a, shift } => (l * l + shift).powf(0.5 * a),
            Phase::Tabulated { table, .. } => table.eval(l),
        }
    }
}

fn check_degree(a: f64) -> Result<()> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::Argument(format!(
            "phase degree must be positive, got {a}"
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Time choices
// ---------------------------------------------------------------------------

/// How the propagation time is chosen: a single time, a grid of times, or a
/// measurable function of the radius given by a table `s -> t(s)`.
#[derive(Clone, Debug)]
pub enum TimeChoice {
    Fixed(f64),
    Grid(Vec<f64>),
    FunctionOfRadius { radii: Vec<f64>, times: Vec<f64> },
}

impl TimeChoice {
    pub fn fixed(t: f64) -> Result<Self> {
        check_time(t)?;
        Ok(TimeChoice::Fixed(t))
    }

    pub fn grid(ts: Vec<f64>) -> Result<Self> {
        if ts.is_empty() {
            return Err(Error::Argument("empty time grid".into()));
        }
        if ts.windows(2).any(|p| p[1] <= p[0]) {
            return Err(Error::Argument("time grid must be ascending".into()));
        }
        for &t in &ts {
            check_time(t)?;
        }
        Ok(TimeChoice::Grid(ts))
    }

    /// Table of times per radius; every time must lie in `(0, 1)`.
    pub fn function_of_radius(radii: Vec<f64>, times: Vec<f64>) -> Result<Self> {
        if radii.len() != times.len() || radii.is_empty() {
            return Err(Error::Argument("radius/time tables must match".into()));
        }
        if radii.windows(2).any(|p| p[1] <= p[0]) {
            return Err(Error::Argument("time table radii must be ascending".into()));
        }
        for &t in &times {
            check_time(t)?;
        }
        Ok(TimeChoice::FunctionOfRadius { radii, times })
    }

    /// Time at a radius: exact at table nodes, linear in between.
    pub fn time_at(&self, s: f64) -> Result<f64> {
        match self {
            TimeChoice::Fixed(t) => Ok(*t),
            TimeChoice::Grid(_) => Err(Error::Argument(
                "a time grid does not define a time per radius".into(),
            )),
            TimeChoice::FunctionOfRadius { radii, times } => {
                let idx = radii.partition_point(|&r| r < s);
                if idx < radii.len() && (radii[idx] - s).abs() <= 1e-12 * (1.0 + s.abs()) {
                    return Ok(times[idx]);
                }
                if idx == 0 || idx == radii.len() {
                    return Err(Error::Precondition(format!(
                        "radius {s} outside the time table"
                    )));
                }
                let (r0, r1) = (radii[idx - 1], radii[idx]);
                let w = (s - r0) / (r1 - r0);
                Ok(times[idx - 1] * (1.0 - w) + times[idx] * w)
            }
        }
    }
}

fn check_time(t: f64) -> Result<()> {
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::Precondition(format!(
            "times must lie in the open interval (0, 1), got {t}"
        )));
    }
    Ok(())
}

/// Logarithmically spaced time grid in `(1e-4, 1 - 1e-4)`, the default mesh
/// over which the maximal function is approximated.
pub fn log_time_grid(nodes: usize) -> Vec<f64> {
    assert!(nodes >= 2);
    let (lo, hi): (f64, f64) = (1e-4, 1.0 - 1e-4);
    let (llo, lhi) = (lo.ln(), hi.ln());
    (0..nodes)
        .map(|k| (llo + (lhi - llo) * k as f64 / (nodes - 1) as f64).exp())
        .collect()
}

/// Superset refinement of a time grid: the original nodes plus their
/// geometric midpoints. Because the result contains the input, the maximal
/// function over the refined grid dominates the original pointwise.
pub fn refine_time_grid(grid: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * grid.len());
    for (k, &t) in grid.iter().enumerate() {
        out.push(t);
        if k + 1 < grid.len() {
            out.push((t * grid[k + 1]).sqrt());
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Boundedness predicates
// ---------------------------------------------------------------------------

/// Result of a sup-difference scan over a frequency grid: the sup, where it
/// was attained, and whether the difference looks bounded (no growth trend
/// toward the high end of the grid).
#[derive(Clone, Copy, Debug)]
pub struct BoundReport {
    pub sup_diff: f64,
    pub at_lambda: f64,
    pub bounded: bool,
}

fn sup_scan<F: Fn(f64) -> f64>(diff: F, threshold: f64, grid: &[f64]) -> Result<BoundReport> {
    if grid.is_empty() {
        return Err(Error::Argument("empty scan grid".into()));
    }
    if grid.iter().any(|&l| l <= threshold) {
        return Err(Error::Precondition(format!(
            "scan grid must stay above the threshold {threshold}"
        )));
    }
    let mid = grid.len() / 2;
    let (mut sup, mut at) = (f64::NEG_INFINITY, grid[0]);
    let mut sup_low = 0.0f64;
    let mut sup_high = 0.0f64;
    for (k, &l) in grid.iter().enumerate() {
        let d = diff(l).abs();
        if d > sup {
            sup = d;
            at = l;
        }
        if k < mid {
            sup_low = sup_low.max(d);
        } else {
            sup_high = sup_high.max(d);
        }
    }
    Ok(BoundReport {
        sup_diff: sup,
        at_lambda: at,
        bounded: sup_high <= 1.1 * sup_low + 1e-12,
    })
}

/// Checks `psi(lambda) = lambda^a + O(1)` on a grid above the threshold:
/// reports `sup |psi - lambda^a|` and a boundedness flag.
pub fn concavity_check(phase: &Phase, a: f64, threshold: f64, grid: &[f64]) -> Result<BoundReport> {
    sup_scan(|l| phase.eval(l) - l.powf(a), threshold, grid)
}

/// Checks that two phases differ by a bounded amount in high frequency
/// (the comparable-oscillation predicate behind phase transference).
pub fn comparable_oscillation(
    phase1: &Phase,
    phase2: &Phase,
    threshold: f64,
    grid: &[f64],
) -> Result<BoundReport> {
    sup_scan(|l| phase1.eval(l) - phase2.eval(l), threshold, grid)
}

// ---------------------------------------------------------------------------
// Fixed input/output-constant propagation
// ---------------------------------------------------------------------------

/// The exponents `c1 = 1 - 2 beta` and `c2 = (4 beta - 2 + a)/(2a - 2)` of
/// the uniform oscillatory kernel bound; defined for `a` in (0,1) and
/// `beta` strictly inside `(a/4, min(a/2, 1/4))`, where `0 < c1 < c2 < 1`.
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct WaltherConstants {
    pub a: f64,
    pub beta: f64,
    pub c1: f64,
    pub c2: f64,
}

/// Computes the kernel-bound exponents, rejecting parameters outside the
/// open admissible region (the endpoint `beta = a/4` sends `c2 -> 1`).
pub fn walther_constants(a: f64, beta: f64) -> Result<WaltherConstants> {
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::Precondition(format!(
            "degree a must be in (0,1), got {a}"
        )));
    }
    let upper = (0.5 * a).min(0.25);
    if !(beta > 0.25 * a && beta < upper) {
        return Err(Error::Precondition(format!(
            "beta must lie in ({}, {upper}) for a = {a}, got {beta}",
            0.25 * a
        )));
    }
    let c1 = 1.0 - 2.0 * beta;
    let c2 = (4.0 * beta - 2.0 + a) / (2.0 * a - 2.0);
    debug_assert!(0.0 < c1 && c1 < c2 && c2 < 1.0);
    Ok(WaltherConstants { a, beta, c1, c2 })
}

/// Dispersive propagator with a cached spherical-function matrix.
pub struct Propagator {
    lambdas: Vec<f64>,
    radii: Vec<f64>,
    phi: PhiTable,
    /// `C_inv * |c(lambda_j)|^-2 * w_j` per frequency node.
    spectral_weight: Vec<f64>,
}

impl Propagator {
    /// Builds the cache for one (spectral grid, radius set) pair. `c_inv` is
    /// the calibrated inversion constant of the space.
    pub fn new(
        evaluator: &SphericalEvaluator,
        grid: &SpectralGrid,
        radii: &[f64],
        c_inv: f64,
    ) -> Result<Self> {
        if !(c_inv.is_finite() && c_inv > 0.0) {
            return Err(Error::Uncalibrated(format!(
                "inversion constant must be positive and finite, got {c_inv}"
            )));
        }
        let phi = evaluator.phi_table(grid.lambdas(), radii)?;
        let space = evaluator.space();
        // same weight expression (and association) as the inverse transform,
        // so propagation at t = 0 is the inverse transform bit-for-bit
        let mut spectral_weight = Vec::with_capacity(grid.len());
        for (&l, &w) in grid.lambdas().iter().zip(grid.weights()) {
            spectral_weight.push(plancherel_density(space, l)? * w * c_inv);
        }
        Ok(Self {
            lambdas: grid.lambdas().to_vec(),
            radii: radii.to_vec(),
            phi,
            spectral_weight,
        })
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    fn check_spectrum(&self, spectrum: &Spectrum) -> Result<()> {
        if spectrum.grid.lambdas() != self.lambdas.as_slice() {
            return Err(Error::Argument(
                "spectrum grid does not match the propagator cache".into(),
            ));
        }
        Ok(())
    }

    /// `u(s_i, t)` for a single time. At `t = 0` the multiplier is exactly 1
    /// and this is the inverse transform.
    pub fn propagate(&self, spectrum: &Spectrum, phase: &Phase, t: f64) -> Result<Vec<Complex64>> {
        if !t.is_finite() {
            return Err(Error::Argument(format!("non-finite time {t}")));
        }
        self.check_spectrum(spectrum)?;
        let coeffs: Vec<Complex64> = spectrum
            .values
            .iter()
            .zip(&self.spectral_weight)
            .zip(&self.lambdas)
            .map(|((v, &dw), &l)| v * dw * Complex64::from_polar(1.0, t * phase.eval(l)))
            .collect();
        Ok(self.phi.synthesize(&coeffs))
    }

    /// `u(s_i)` at the radius-dependent time `t(s_i)`.
    pub fn linearized(
        &self,
        spectrum: &Spectrum,
        phase: &Phase,
        time_choice: &TimeChoice,
    ) -> Result<Vec<Complex64>> {
        self.check_spectrum(spectrum)?;
        let mut out = Vec::with_capacity(self.radii.len());
        for (i, &s) in self.radii.iter().enumerate() {
            let t = time_choice.time_at(s)?;
            check_time(t)?;
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, (v, &dw)) in spectrum
                .values
                .iter()
                .zip(&self.spectral_weight)
                .enumerate()
            {
                let osc = Complex64::from_polar(1.0, t * phase.eval(self.lambdas[j]));
                acc += v * dw * osc * self.phi.row(j)[i];
            }
            out.push(acc);
        }
        Ok(out)
    }

    /// Pointwise maximum of `|u(s_i, t)|` over the time grid. Monotone
    /// non-decreasing under time-grid refinement.
    pub fn maximal(&self, spectrum: &Spectrum, phase: &Phase, t_grid: &[f64]) -> Result<Vec<f64>> {
        if t_grid.is_empty() {
            return Err(Error::Argument(
                "empty time grid for the maximal function".into(),
            ));
        }
        for &t in t_grid {
            check_time(t)?;
        }
        self.check_spectrum(spectrum)?;
        let mut sup = vec![0.0f64; self.radii.len()];
        for &t in t_grid {
            let u = self.propagate(spectrum, phase, t)?;
            for (m, v) in sup.iter_mut().zip(&u) {
                *m = m.max(v.norm());
            }
        }
        Ok(sup)
    }
}

/// Applies the unimodular multiplier `e^{i t psi}` on the frequency side.
/// The spectral L^2 norm is preserved exactly.
pub fn modulate(spectrum: &Spectrum, phase: &Phase, t: f64) -> Spectrum {
    let values = spectrum
        .values
        .iter()
        .zip(spectrum.grid.lambdas())
        .map(|(v, &l)| v * Complex64::from_polar(1.0, t * phase.eval(l)))
        .collect();
    Spectrum {
        grid: spectrum.grid.clone(),
        values,
    }
}

/// One-shot propagation onto a radial grid (builds a [`Propagator`] cache
/// internally; use the struct directly when sweeping times).
pub fn propagate(
    evaluator: &SphericalEvaluator,
    spectrum: &Spectrum,
    phase: &Phase,
    t: f64,
    grid: &RadialGrid,
    c_inv: f64,
) -> Result<RadialProfile> {
    let prop = Propagator::new(evaluator, &spectrum.grid, grid.radii(), c_inv)?;
    RadialProfile::new(grid.clone(), prop.propagate(spectrum, phase, t)?)
}

/// One-shot maximal function over a time grid.
pub fn maximal(
    evaluator: &SphericalEvaluator,
    spectrum: &Spectrum,
    phase: &Phase,
    t_grid: &[f64],
    grid: &RadialGrid,
    c_inv: f64,
) -> Result<Vec<f64>> {
    let prop = Propagator::new(evaluator, &spectrum.grid, grid.radii(), c_inv)?;
    prop.maximal(spectrum, phase, t_grid)
}

/// One-shot linearized maximal operator with a radius-dependent time.
pub fn linearized(
    evaluator: &SphericalEvaluator,
    spectrum: &Spectrum,
    phase: &Phase,
    time_choice: &TimeChoice,
    grid: &RadialGrid,
    c_inv: f64,
) -> Result<RadialProfile> {
    let prop = Propagator::new(evaluator, &spectrum.grid, grid.radii(), c_inv)?;
    RadialProfile::new(grid.clone(), prop.linearized(spectrum, phase, time_choice)?)
}

// ---------------------------------------------------------------------------
// Euclidean propagator
// ---------------------------------------------------------------------------

/// Euclidean radial propagator
/// `S~_t f(r) = C_n * sum_j script_j((n-2)/2, lambda_j r) e^{i t lambda_j^a}
///  F f(lambda_j) lambda_j^{n-1} w_j`,
/// satisfying the dilation identity
/// `S~_t f(r) = S~_{t/R^a} f_R(r/R)` with `f_R(x) = f(Rx)`.
pub fn propagate_euclid(
    transform: &EuclidTransform,
    spectrum: &Spectrum,
    a: f64,
    t: f64,
    r_values: &[f64],
) -> Result<Vec<Complex64>> {
    check_degree(a)?;
    if !t.is_finite() {
        return Err(Error::Argument(format!("non-finite time {t}")));
    }
    let n = transform.dimension() as i32;
    let mu = BesselOrder::from_twice(transform.dimension() - 2);
    let coeffs: Vec<Complex64> = spectrum
        .values
        .iter()
        .zip(spectrum.grid.lambdas())
        .zip(spectrum.grid.weights())
        .map(|((v, &l), &w)| {
            v * Complex64::from_polar(1.0, t * l.powf(a))
                * (l.powi(n - 1) * w * transform.inversion_constant())
        })
        .collect();
    Ok(r_values
        .iter()
        .map(|&r| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (c, &l) in coeffs.iter().zip(spectrum.grid.lambdas()) {
                acc += c * script_j(mu, l * r);
            }
            acc
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{spectral_l2_norm, RadialGrid, SpectralGrid};
    use proptest::prelude::*;

    fn h3() -> SpaceParams {
        SpaceParams::hyperbolic3()
    }

    fn test_spectrum() -> Spectrum {
        let grid = SpectralGrid::gauss_panels(1.0, 4.0, 4, 8).unwrap();
        Spectrum::sample(grid, |l| {
            Complex64::new((-(l - 2.5) * (l - 2.5) * 4.0).exp(), 0.0)
        })
        .unwrap()
    }

    #[test]
    fn walther_constants_spot_values() {
        let w = walther_constants(0.5, 0.2).unwrap();
        assert!((w.c1 - 0.6).abs() < 1e-15);
        assert!((w.c2 - 0.7).abs() < 1e-15);
        let w = walther_constants(0.8, 0.21).unwrap();
        assert!((w.c1 - 0.58).abs() < 1e-15);
        assert!((w.c2 - 0.9).abs() < 1e-12);
        // the beta = a/4 endpoint is excluded (c2 -> 1 there)
        assert!(walther_constants(0.5, 0.125).is_err());
        assert!(walther_constants(0.5, 0.25).is_err());
        assert!(walther_constants(1.2, 0.2).is_err());
    }

    #[test]
    fn phase_forms() {
        let space = h3();
        let shifted = Phase::shifted_power_law(0.5, space).unwrap();
        let plain = Phase::power_law(0.5).unwrap();
        assert!((shifted.eval(2.0) - (4.0f64 + 1.0).powf(0.25)).abs() < 1e-15);
        assert!((plain.eval(2.0) - 2.0f64.powf(0.5)).abs() < 1e-15);
        // tabulated phase reproduces its nodes
        let nodes: Vec<f64> = (0..50).map(|k| 0.2 * k as f64).collect();
        let vals: Vec<f64> = nodes.iter().map(|l| l.powf(0.5)).collect();
        let tab = Phase::tabulated(nodes.clone(), vals, 0.5).unwrap();
        for &l in &nodes {
            assert!((tab.eval(l) - l.powf(0.5)).abs() < 1e-12);
        }
    }

    #[test]
    fn concavity_and_comparable_oscillation() {
        let space = h3();
        let grid: Vec<f64> = (1..=200).map(|k| 5.0 + 2.0 * k as f64).collect();
        let shifted = Phase::shifted_power_law(0.6, space).unwrap();
        let rep = concavity_check(&shifted, 0.6, 5.0, &grid).unwrap();
        assert!(rep.bounded, "shifted power law is asymptotically concave");
        assert!(rep.sup_diff < 0.1);

        let plain = Phase::power_law(0.6).unwrap();
        let rep = concavity_check(&plain, 0.6, 5.0, &grid).unwrap();
        assert_eq!(rep.sup_diff, 0.0);

        let wrong = Phase::power_law(0.8).unwrap();
        let rep = concavity_check(&wrong, 0.6, 5.0, &grid).unwrap();
        assert!(!rep.bounded, "mismatched degree must be flagged unbounded");

        let rep = comparable_oscillation(&shifted, &plain, 5.0, &grid).unwrap();
        assert!(rep.bounded);
        let rep = comparable_oscillation(&plain, &plain, 5.0, &grid).unwrap();
        assert_eq!(rep.sup_diff, 0.0);
    }

    #[test]
    fn propagate_at_zero_time_is_inversion_bitwise() {
        let ev = SphericalEvaluator::new(h3());
        let c_inv = 2.0 / std::f64::consts::PI;
        let spec = test_spectrum();
        let radii: Vec<f64> = (1..=20).map(|k| 0.1 * k as f64).collect();
        let prop = Propagator::new(&ev, &spec.grid, &radii, c_inv).unwrap();
        let phase = Phase::power_law(0.5).unwrap();
        let u0 = prop.propagate(&spec, &phase, 0.0).unwrap();

        // identity multiplier leaves the spectrum bitwise untouched
        let modulated = modulate(&spec, &phase, 0.0);
        assert_eq!(spec.values, modulated.values);
        let again = prop.propagate(&modulated, &phase, 0.0).unwrap();
        assert_eq!(u0, again);

        // and the t = 0 propagation runs through the same synthesis kernel
        // as the inverse transform: equal value by value
        let transform = crate::spectral::Transform::with_inversion_constant(&ev, c_inv);
        let weights = vec![0.1; radii.len()];
        let grid = RadialGrid::from_nodes(radii.clone(), weights, 0.0, 2.0).unwrap();
        let inverse = transform.isft(&spec, &grid).unwrap();
        assert_eq!(u0, inverse.values);
    }

    #[test]
    fn modulation_preserves_spectral_norm_exactly() {
        let spec = test_spectrum();
        let phase = Phase::power_law(0.7).unwrap();
        let before = spectral_l2_norm(h3(), &spec).unwrap();
        let after = spectral_l2_norm(h3(), &modulate(&spec, &phase, 0.37)).unwrap();
        assert!((before - after).abs() <= 1e-14 * before);
    }

    #[test]
    fn narrow_band_propagation_is_modulation_in_modulus() {
        let ev = SphericalEvaluator::new(h3());
        let l0 = 3.0;
        let grid = SpectralGrid::gauss_panels(l0 - 5e-4, l0 + 5e-4, 2, 8).unwrap();
        let spec = Spectrum::sample(grid, |_| Complex64::new(1.0, 0.0)).unwrap();
        let radii: Vec<f64> = (1..=15).map(|k| 0.2 * k as f64).collect();
        let prop = Propagator::new(&ev, &spec.grid, &radii, 2.0 / std::f64::consts::PI).unwrap();
        let phase = Phase::power_law(0.5).unwrap();
        let u0 = prop.propagate(&spec, &phase, 0.0).unwrap();
        let ut = prop.propagate(&spec, &phase, 0.9).unwrap();
        for (a, b) in u0.iter().zip(&ut) {
            assert!((a.norm() - b.norm()).abs() < 1e-6 * a.norm().max(1e-12));
        }
    }

    #[test]
    fn maximal_monotone_under_refinement_and_singleton() {
        let ev = SphericalEvaluator::new(h3());
        let spec = test_spectrum();
        let radii: Vec<f64> = (1..=10).map(|k| 0.15 * k as f64).collect();
        let prop = Propagator::new(&ev, &spec.grid, &radii, 2.0 / std::f64::consts::PI).unwrap();
        let phase = Phase::power_law(0.5).unwrap();

        let coarse = log_time_grid(16);
        let fine = log_time_grid(31); // superset-like refinement by density
        let m_coarse = prop.maximal(&spec, &phase, &coarse).unwrap();
        // a genuine superset: coarse plus midpoints
        let mut superset = coarse.clone();
        for w in coarse.windows(2) {
            superset.push(0.5 * (w[0] + w[1]));
        }
        superset.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let m_super = prop.maximal(&spec, &phase, &superset).unwrap();
        for (a, b) in m_coarse.iter().zip(&m_super) {
            assert!(b >= a, "maximal must grow under time-grid refinement");
        }
        let _ = fine;

        let t0 = 0.42;
        let single = prop.maximal(&spec, &phase, &[t0]).unwrap();
        let direct = prop.propagate(&spec, &phase, t0).unwrap();
        for (m, u) in single.iter().zip(&direct) {
            assert_eq!(*m, u.norm());
        }
        assert!(prop.maximal(&spec, &phase, &[]).is_err());
        assert!(prop.maximal(&spec, &phase, &[1.5]).is_err());
    }

    #[test]
    fn maximal_dominates_small_time_propagation() {
        let ev = SphericalEvaluator::new(h3());
        let spec = test_spectrum();
        let radii: Vec<f64> = (1..=10).map(|k| 0.15 * k as f64).collect();
        let prop = Propagator::new(&ev, &spec.grid, &radii, 2.0 / std::f64::consts::PI).unwrap();
        let phase = Phase::power_law(0.5).unwrap();
        let grid = log_time_grid(64);
        let m = prop.maximal(&spec, &phase, &grid).unwrap();
        let u = prop.propagate(&spec, &phase, 1e-4).unwrap();
        for (sup, v) in m.iter().zip(&u) {
            assert!(*sup >= v.norm() - 1e-12);
        }
    }

    #[test]
    fn linearized_constant_time_equals_propagate() {
        let ev = SphericalEvaluator::new(h3());
        let spec = test_spectrum();
        let radii: Vec<f64> = (1..=10).map(|k| 0.15 * k as f64).collect();
        let prop = Propagator::new(&ev, &spec.grid, &radii, 2.0 / std::f64::consts::PI).unwrap();
        let phase = Phase::power_law(0.5).unwrap();
        let t0 = 0.3;
        let table = TimeChoice::function_of_radius(radii.clone(), vec![t0; radii.len()]).unwrap();
        let lin = prop.linearized(&spec, &phase, &table).unwrap();
        let direct = prop.propagate(&spec, &phase, t0).unwrap();
        for (a, b) in lin.iter().zip(&direct) {
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn linearized_dominated_by_maximal_on_snapped_times() {
        let ev = SphericalEvaluator::new(h3());
        let spec = test_spectrum();
        let radii: Vec<f64> = (1..=8).map(|k| 0.2 * k as f64).collect();
        let prop = Propagator::new(&ev, &spec.grid, &radii, 2.0 / std::f64::consts::PI).unwrap();
        let phase = Phase::power_law(0.5).unwrap();
        let t_grid = log_time_grid(32);
        // time choice snapped to grid values
        let times: Vec<f64> = radii
            .iter()
            .enumerate()
            .map(|(k, _)| t_grid[(3 * k + 1) % t_grid.len()])
            .collect();
        let mut pairs: Vec<(f64, f64)> = radii.iter().copied().zip(times).collect();
        pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let table = TimeChoice::function_of_radius(
            pairs.iter().map(|p| p.0).collect(),
            pairs.iter().map(|p| p.1).collect(),
        )
        .unwrap();
        let lin = prop.linearized(&spec, &phase, &table).unwrap();
        let sup = prop.maximal(&spec, &phase, &t_grid).unwrap();
        for (l, m) in lin.iter().zip(&sup) {
            assert!(l.norm() <= m + 1e-12);
        }
    }

    #[test]
    fn time_choice_validation() {
        assert!(TimeChoice::fixed(0.0).is_err());
        assert!(TimeChoice::fixed(1.0).is_err());
        assert!(TimeChoice::grid(vec![0.2, 0.1]).is_err());
        assert!(TimeChoice::function_of_radius(vec![0.1, 0.2], vec![0.5, 1.5]).is_err());
        let t = TimeChoice::function_of_radius(vec![0.1, 0.3], vec![0.2, 0.4]).unwrap();
        assert!((t.time_at(0.2).unwrap() - 0.3).abs() < 1e-14);
        assert!(t.time_at(0.05).is_err());
    }

    #[test]
    fn euclid_dilation_identity() {
        // S~_t f(r) = S~_{t/R^a} f_R(r/R) with F f_R(lambda) = R^-n F f(lambda/R)
        let t3 = EuclidTransform::new(3).unwrap();
        let bump = |l: f64| {
            let y = (l - 1.25) / 0.75;
            if y.abs() >= 1.0 {
                0.0
            } else {
                let u = (y.abs() - 1.0 / 3.0).max(0.0) * 1.5;
                if u <= 0.0 {
                    1.0
                } else {
                    let f = |v: f64| (-1.0 / v).exp();
                    f(1.0 - u) / (f(1.0 - u) + f(u))
                }
            }
        };
        let r_values: Vec<f64> = (0..=40).map(|k| 0.075 * k as f64).collect();
        for &big_r in &[2.0, 5.0] {
            for &a in &[0.3, 0.5, 0.8] {
                let t = 0.7;
                let grid = SpectralGrid::gauss_panels(0.5, 2.0, 8, 16).unwrap();
                let spec = Spectrum::sample(grid, |l| Complex64::new(bump(l), 0.0)).unwrap();
                let lhs = propagate_euclid(&t3, &spec, a, t, &r_values).unwrap();

                let grid_r = SpectralGrid::gauss_panels(0.5 * big_r, 2.0 * big_r, 8, 16).unwrap();
                let spec_r = Spectrum::sample(grid_r, |l| {
                    Complex64::new(bump(l / big_r) / big_r.powi(3), 0.0)
                })
                .unwrap();
                let scaled_r: Vec<f64> = r_values.iter().map(|r| r / big_r).collect();
                let rhs = propagate_euclid(&t3, &spec_r, a, t / big_r.powf(a), &scaled_r).unwrap();
                for ((l, r), rv) in lhs.iter().zip(&rhs).zip(&r_values) {
                    assert!(
                        (l - r).norm() < 1e-8,
                        "R = {big_r}, a = {a}, r = {rv}: {l} vs {r}"
                    );
                }
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(256))]
        #[test]
        fn walther_ordering_invariant(a in 0.01f64..0.99, u in 0.0f64..1.0) {
            let lo = 0.25 * a;
            let hi = (0.5 * a).min(0.25);
            let beta = lo + (hi - lo) * (0.02 + 0.96 * u);
            let w = walther_constants(a, beta).unwrap();
            prop_assert!(0.0 < w.c1 && w.c1 < w.c2 && w.c2 < 1.0);
        }
    }
}

//! The spherical function `phi_lambda(s)`: the radial eigenfunction of the
//! Laplace-Beltrami operator with eigenvalue `-(lambda^2 + Q^2/4)`,
//! normalized to 1 at the identity.
//!
//! `phi` is evaluated by integrating the radial equation
//!
//! ```text
//! u'' + (A'/A)(s) u' + (lambda^2 + Q^2/4) u = 0,   u(0) = 1, u'(0) = 0
//! ```
//!
//! outward from a Taylor seed placed just off the coordinate singularity at
//! `s = 0`. The two series regimes (normalized-Bessel main term near the
//! identity, c-function plane-wave term in the far field) are provided as
//! validation envelopes, not as evaluators.

use crate::error::{Error, Result};
use crate::numerics::ode::{integrate_path, Rk45Options};
use crate::specfun::{density, density_log_derivative, script_j, BesselOrder, SpaceParams};
use num_complex::Complex64;
use rayon::prelude::*;

/// Radius separating the near-identity and far-field series regimes.
/// Any value in (2, infinity) works for diagnostics; 2 is the conventional
/// floor of that interval.
pub const DEFAULT_REGIME_RADIUS: f64 = 2.0;

/// Evaluator for `phi_lambda` on a fixed space.
#[derive(Clone, Copy, Debug)]
pub struct SphericalEvaluator {
    space: SpaceParams,
    ode_tolerance: f64,
    taylor_start: f64,
    regime_radius: f64,
}

impl SphericalEvaluator {
    pub fn new(space: SpaceParams) -> Self {
        Self {
            space,
            ode_tolerance: 1e-10,
            taylor_start: 1e-4,
            regime_radius: DEFAULT_REGIME_RADIUS,
        }
    }

    /// Relative ODE tolerance, restricted to `(0, 1e-6]`.
    pub fn with_tolerance(mut self, tol: f64) -> Result<Self> {
        if !(tol > 0.0 && tol <= 1e-6) {
            return Err(Error::Argument(format!(
                "ode_tolerance must lie in (0, 1e-6], got {tol}"
            )));
        }
        self.ode_tolerance = tol;
        Ok(self)
    }

    /// Radius where integration starts from the Taylor seed, in `(0, 1e-2]`.
    pub fn with_taylor_start(mut self, s0: f64) -> Result<Self> {
        if !(s0 > 0.0 && s0 <= 1e-2) {
            return Err(Error::Argument(format!(
                "taylor_start must lie in (0, 1e-2], got {s0}"
            )));
        }
        self.taylor_start = s0;
        Ok(self)
    }

    pub fn space(&self) -> SpaceParams {
        self.space
    }

    pub fn regime_radius(&self) -> f64 {
        self.regime_radius
    }

    /// `phi_lambda` on an ascending grid of radii `>= 0`.
    ///
    /// Even in `lambda`, bounded by 1 in absolute value, equal to 1 at `s = 0`.
    pub fn phi(&self, lambda: f64, s_grid: &[f64]) -> Result<Vec<f64>> {
        if !lambda.is_finite() {
            return Err(Error::Argument(format!("non-finite frequency {lambda}")));
        }
        if s_grid.is_empty() {
            return Err(Error::Argument("empty radius grid".into()));
        }
        if s_grid.iter().any(|s| !s.is_finite() || *s < 0.0) {
            return Err(Error::Argument("radii must be finite and >= 0".into()));
        }
        if s_grid.windows(2).any(|p| p[1] <= p[0]) {
            return Err(Error::Argument(
                "radius grid must be strictly ascending".into(),
            ));
        }
        let kappa = lambda * lambda + self.space.q2_over_4();
        let s0 = self.taylor_start;

        let split = s_grid.partition_point(|&s| s <= s0);
        let mut out = Vec::with_capacity(s_grid.len());
        for &s in &s_grid[..split] {
            out.push(taylor_seed(self.space, kappa, s).0);
        }
        if split < s_grid.len() {
            let (u0, du0) = taylor_seed(self.space, kappa, s0);
            let space = self.space;
            let rhs = move |s: f64, y: [f64; 2]| {
                [
                    y[1],
                    -density_log_derivative(space, s) * y[1] - kappa * y[0],
                ]
            };
            let opts = Rk45Options {
                rtol: self.ode_tolerance,
                atol: self.ode_tolerance * 1e-3,
                h_max: 0.1 / (1.0 + lambda.abs()),
            };
            let states = integrate_path(rhs, s0, [u0, du0], &s_grid[split..], opts)?;
            out.extend(states.into_iter().map(|y| y[0]));
        }
        Ok(out)
    }

    /// Cached matrix of `phi_{lambda_j}(s_i)` values, rows built in parallel
    /// over the frequencies.
    pub fn phi_table(&self, lambdas: &[f64], radii: &[f64]) -> Result<PhiTable> {
        let rows: Result<Vec<Vec<f64>>> = lambdas.par_iter().map(|&l| self.phi(l, radii)).collect();
        let rows = rows?;
        let mut values = Vec::with_capacity(lambdas.len() * radii.len());
        for row in rows {
            values.extend(row);
        }
        Ok(PhiTable {
            lambdas: lambdas.to_vec(),
            radii: radii.to_vec(),
            values,
        })
    }
}

/// Taylor expansion of the regular solution about `s = 0`:
/// `u = 1 - kappa s^2 / (2n) + kappa (kappa + 2 gamma_1) s^4 / (8n(n+2))`
/// with `gamma_1` the linear coefficient of `A'/A - (n-1)/s` at the origin.
fn taylor_seed(space: SpaceParams, kappa: f64, s: f64) -> (f64, f64) {
    let n = space.n() as f64;
    let gamma1 = (space.m_v() + space.m_z()) as f64 / 12.0 + space.m_z() as f64 / 4.0;
    let b2 = -kappa / (2.0 * n);
    let b4 = kappa * (kappa + 2.0 * gamma1) / (8.0 * n * (n + 2.0));
    let s2 = s * s;
    (
        1.0 + b2 * s2 + b4 * s2 * s2,
        2.0 * b2 * s + 4.0 * b4 * s2 * s,
    )
}

/// Values of `phi` on a frequency-by-radius grid, row-major over frequency.
#[derive(Clone, Debug)]
pub struct PhiTable {
    lambdas: Vec<f64>,
    radii: Vec<f64>,
    values: Vec<f64>,
}

impl PhiTable {
    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    /// Row of values for the `j`-th frequency.
    pub fn row(&self, j: usize) -> &[f64] {
        let n = self.radii.len();
        &self.values[j * n..(j + 1) * n]
    }

    /// Frequency synthesis `out[i] = sum_j coeffs[j] phi_j(s_i)`, summed in
    /// fixed frequency order. The inverse transform and the propagator both
    /// run through this kernel, so the propagator at `t = 0` reproduces the
    /// inverse transform bit-for-bit.
    pub fn synthesize(&self, coeffs: &[num_complex::Complex64]) -> Vec<num_complex::Complex64> {
        assert_eq!(coeffs.len(), self.lambdas.len());
        let mut out = vec![num_complex::Complex64::new(0.0, 0.0); self.radii.len()];
        for (j, c) in coeffs.iter().enumerate() {
            for (o, phi) in out.iter_mut().zip(self.row(j)) {
                *o += c * phi;
            }
        }
        out
    }
}

/// Leading near-identity term: `(s^{n-1}/A(s))^{1/2} script_j((n-2)/2, lambda s)`.
///
/// The normalization pairs the kernel with `script_j(mu, 0) = 1` so the main
/// term reproduces `phi(0) = 1`; on the degenerate space `(0, 2)` it is the
/// exact closed form `sin(lambda s) / (lambda sinh s)`.
pub fn phi_near_main(space: SpaceParams, lambda: f64, s: f64) -> Result<f64> {
    if !(s > 0.0 && s <= DEFAULT_REGIME_RADIUS) {
        return Err(Error::Domain(format!(
            "near-field main term needs s in (0, {DEFAULT_REGIME_RADIUS}], got {s}"
        )));
    }
    let n = space.n();
    let prefactor = (s.powi(n as i32 - 1) / density(space, s)?).sqrt();
    let mu = BesselOrder::from_twice(n - 2);
    Ok(prefactor * script_j(mu, (lambda * s).abs()))
}

/// Leading far-field term:
/// `2^{-m_z/2} A(s)^{-1/2} * 2 Re[c(lambda) e^{i lambda s}]`.
///
/// The c-function is supplied by the caller; `lambda = 0` is rejected since
/// `c` is singular there.
pub fn phi_far_main<F>(space: SpaceParams, c_fn: F, lambda: f64, s: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<Complex64>,
{
    if lambda == 0.0 {
        return Err(Error::Domain(
            "far-field main term undefined at lambda = 0 (c-function pole)".into(),
        ));
    }
    if !(s > DEFAULT_REGIME_RADIUS) {
        return Err(Error::Domain(format!(
            "far-field main term needs s > {DEFAULT_REGIME_RADIUS}, got {s}"
        )));
    }
    let c = c_fn(lambda)?;
    let wave = Complex64::from_polar(1.0, lambda * s);
    let amp = 2f64.powf(-(space.m_z() as f64) / 2.0) / density(space, s)?.sqrt();
    Ok(amp * 2.0 * (c * wave).re)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h3() -> SpaceParams {
        SpaceParams::hyperbolic3()
    }

    fn h3_phi(lambda: f64, s: f64) -> f64 {
        if s == 0.0 {
            1.0
        } else if lambda == 0.0 {
            s / s.sinh()
        } else {
            (lambda * s).sin() / (lambda * s.sinh())
        }
    }

    #[test]
    fn phi_matches_h3_closed_form() {
        let ev = SphericalEvaluator::new(h3());
        let grid: Vec<f64> = (1..=120).map(|k| 0.05 * k as f64).collect();
        for &lambda in &[0.5, 1.0, 2.0, 5.0, 10.0] {
            let vals = ev.phi(lambda, &grid).unwrap();
            for (s, v) in grid.iter().zip(&vals) {
                assert!(
                    (v - h3_phi(lambda, *s)).abs() < 1e-9,
                    "lambda = {lambda}, s = {s}"
                );
            }
        }
    }

    #[test]
    fn phi_matches_h3_closed_form_at_experiment_frequencies() {
        // the counterexample families drive the evaluator to lambda ~ 320
        let ev = SphericalEvaluator::new(h3());
        let grid: Vec<f64> = (1..=50).map(|k| 0.02 * k as f64).collect();
        for &lambda in &[64.0, 160.0, 320.0] {
            let vals = ev.phi(lambda, &grid).unwrap();
            for (s, v) in grid.iter().zip(&vals) {
                assert!(
                    (v - h3_phi(lambda, *s)).abs() < 1e-9,
                    "lambda = {lambda}, s = {s}"
                );
            }
        }
    }

    #[test]
    fn phi_is_one_at_identity_and_even_in_lambda() {
        let ev = SphericalEvaluator::new(SpaceParams::new(2, 1).unwrap());
        let grid = [0.0, 0.4, 1.3];
        let plus = ev.phi(2.0, &grid).unwrap();
        let minus = ev.phi(-2.0, &grid).unwrap();
        assert_eq!(plus[0], 1.0);
        for (a, b) in plus.iter().zip(&minus) {
            assert!((a - b).abs() < 1e-10);
        }
        let zero_plus = ev.phi(0.0, &grid).unwrap();
        let zero_minus = ev.phi(-0.0, &grid).unwrap();
        for (a, b) in zero_plus.iter().zip(&zero_minus) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn phi_bounded_by_one() {
        for space in [
            h3(),
            SpaceParams::new(2, 1).unwrap(),
            SpaceParams::new(4, 3).unwrap(),
        ] {
            let ev = SphericalEvaluator::new(space);
            let grid: Vec<f64> = (1..=60).map(|k| 0.1 * k as f64).collect();
            for &lambda in &[0.0, 0.7, 3.0, 21.0] {
                for v in ev.phi(lambda, &grid).unwrap() {
                    assert!(v.abs() <= 1.0 + 1e-9, "space {space:?} lambda {lambda}");
                }
            }
        }
    }

    #[test]
    fn phi_solves_the_radial_equation() {
        // 4th-order central second difference of the computed solution,
        // residual bounded by 1e-6 (1 + lambda^2)
        let space = SpaceParams::new(2, 1).unwrap();
        let ev = SphericalEvaluator::new(space);
        let h = 5e-4;
        for &lambda in &[0.5, 2.0, 5.0] {
            let kappa = lambda * lambda + space.q2_over_4();
            for &s in &[0.5, 1.5, 3.0] {
                let grid = [s - 2.0 * h, s - h, s, s + h, s + 2.0 * h];
                let u = ev.phi(lambda, &grid).unwrap();
                let d2 = (-u[0] + 16.0 * u[1] - 30.0 * u[2] + 16.0 * u[3] - u[4]) / (12.0 * h * h);
                let d1 = (u[0] - 8.0 * u[1] + 8.0 * u[3] - u[4]) / (12.0 * h);
                let residual = d2 + density_log_derivative(space, s) * d1 + kappa * u[2];
                assert!(
                    residual.abs() <= 1e-6 * (1.0 + lambda * lambda),
                    "lambda = {lambda}, s = {s}, residual = {residual}"
                );
            }
        }
    }

    #[test]
    fn phi_rejects_bad_grids() {
        let ev = SphericalEvaluator::new(h3());
        assert!(matches!(ev.phi(1.0, &[]), Err(Error::Argument(_))));
        assert!(matches!(ev.phi(1.0, &[0.5, 0.5]), Err(Error::Argument(_))));
        assert!(matches!(ev.phi(1.0, &[1.0, 0.5]), Err(Error::Argument(_))));
        assert!(matches!(ev.phi(f64::NAN, &[1.0]), Err(Error::Argument(_))));
    }

    #[test]
    fn evaluator_builder_invariants() {
        let ev = SphericalEvaluator::new(h3());
        assert!(ev.with_tolerance(1e-5).is_err());
        assert!(ev.with_tolerance(0.0).is_err());
        assert!(ev.with_taylor_start(0.1).is_err());
        assert!(ev.with_tolerance(1e-12).is_ok());
    }

    #[test]
    fn near_main_term_approaches_phi_at_the_identity() {
        // normalization self-test: phi_near_main / phi -> 1 as s -> 0
        for space in [
            h3(),
            SpaceParams::new(2, 1).unwrap(),
            SpaceParams::new(4, 3).unwrap(),
        ] {
            let ev = SphericalEvaluator::new(space);
            let s = 1e-3;
            let phi = ev.phi(1.0, &[s]).unwrap()[0];
            let main = phi_near_main(space, 1.0, s).unwrap();
            assert!(
                (main / phi - 1.0).abs() < 1e-6,
                "space {space:?}: ratio {}",
                main / phi
            );
        }
    }

    #[test]
    fn near_main_is_exact_on_h3() {
        for &(lambda, s) in &[(5.0, 0.5), (0.0, 1.0), (11.0, 1.9)] {
            let main = phi_near_main(h3(), lambda, s).unwrap();
            assert!((main - h3_phi(lambda, s)).abs() < 1e-12);
        }
    }

    #[test]
    fn near_main_domain_errors() {
        assert!(phi_near_main(h3(), 1.0, 0.0).is_err());
        assert!(phi_near_main(h3(), 1.0, 2.5).is_err());
    }

    #[test]
    fn far_main_is_exact_on_h3() {
        // on (0,2) the c-function is 1/(i lambda) and the leading far-field
        // term already equals phi
        let c = |l: f64| Ok(Complex64::new(0.0, -1.0 / l));
        for &(lambda, s) in &[(3.0, 4.0), (1.0, 2.5), (-3.0, 4.0)] {
            let main = phi_far_main(h3(), c, lambda, s).unwrap();
            let expected = (lambda * s).sin() / (lambda * s.sinh());
            assert!((main - expected).abs() < 1e-12, "lambda {lambda}");
        }
        // spec'd spot value: (sinh 4)^{-1} sin(12) / 3
        let v = phi_far_main(h3(), c, 3.0, 4.0).unwrap();
        assert!((v - (12.0f64).sin() / (3.0 * 4.0f64.sinh())).abs() < 1e-13);
    }

    #[test]
    fn far_main_rejects_zero_frequency_and_small_radius() {
        let c = |l: f64| Ok(Complex64::new(0.0, -1.0 / l));
        assert!(phi_far_main(h3(), c, 0.0, 3.0).is_err());
        assert!(phi_far_main(h3(), c, 1.0, 1.0).is_err());
    }

    #[test]
    fn phi_table_rows_match_single_calls() {
        let ev = SphericalEvaluator::new(h3());
        let lambdas = [0.5, 1.0, 4.0];
        let radii = [0.2, 0.9, 2.2];
        let table = ev.phi_table(&lambdas, &radii).unwrap();
        for (j, &l) in lambdas.iter().enumerate() {
            let direct = ev.phi(l, &radii).unwrap();
            for (a, b) in table.row(j).iter().zip(&direct) {
                assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn phi_table_independent_of_worker_count() {
        let ev = SphericalEvaluator::new(SpaceParams::new(2, 1).unwrap());
        let lambdas: Vec<f64> = (1..=24).map(|k| 0.5 * k as f64).collect();
        let radii: Vec<f64> = (1..=30).map(|k| 0.1 * k as f64).collect();
        let parallel = ev.phi_table(&lambdas, &radii).unwrap();
        let single = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| ev.phi_table(&lambdas, &radii).unwrap());
        for j in 0..lambdas.len() {
            assert_eq!(parallel.row(j), single.row(j));
        }
    }
}

//! The experiment harnesses.

use super::bump::BumpFunction;
use super::counterexample::{build_counterexample, CounterexampleSpec};
use super::report::{fit_loglog, median, ExperimentReport};
use crate::dispersive::{
    log_time_grid, refine_time_grid, walther_constants, Phase, Propagator, TimeChoice,
};
use crate::error::{Error, Result};
use crate::numerics::quad::composite_gauss;
use crate::spectral::{radial_l2_norm, sobolev_norm, RadialGrid, SobolevKind, Transform};
use num_complex::Complex64;
use serde_json::json;
use std::time::Instant;

fn require_calibrated(transform: &Transform) -> Result<f64> {
    transform.inversion_constant().ok_or_else(|| {
        Error::Uncalibrated("experiment harnesses need a calibrated transform".into())
    })
}

fn l2_of_reals(
    space: crate::specfun::SpaceParams,
    grid: &RadialGrid,
    values: &[f64],
) -> Result<f64> {
    let complex: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    radial_l2_norm(space, grid, &complex)
}

// ---------------------------------------------------------------------------
// Sharpness of the beta > a/4 threshold
// ---------------------------------------------------------------------------

/// Configuration of [`sharpness_run`].
#[derive(Clone, Debug, serde::Serialize)]
pub struct SharpnessConfig {
    pub a: f64,
    pub beta: f64,
    pub n_list: Vec<u32>,
    pub epsilon: f64,
    pub spectral_nodes: usize,
    pub annulus_nodes: usize,
    pub slope_tolerance: f64,
}

impl SharpnessConfig {
    pub fn new(a: f64, beta: f64, n_list: Vec<u32>, epsilon: f64) -> Self {
        Self {
            a,
            beta,
            n_list,
            epsilon,
            spectral_nodes: 256,
            annulus_nodes: 64,
            slope_tolerance: 0.05,
        }
    }
}

/// Sharpness experiment: for each `N` computes the Sobolev norm of the
/// counterexample member `f_N` and the L^2 norm of the linearized operator
/// over the annulus `A_{N,eps}` with the stationary time choice
/// `t(s) = s N^{1-a}/a`. The Sobolev norms must scale like `N^{beta - a/4}`
/// (fitted slope within tolerance) and the operator norms must not decay
/// (min at least half the median) — together these defeat the maximal
/// estimate whenever `beta < a/4`, since the ratio then grows without bound.
pub fn sharpness_run(transform: &Transform, cfg: &SharpnessConfig) -> Result<ExperimentReport> {
    let start = Instant::now();
    let c_inv = require_calibrated(transform)?;
    if cfg.n_list.is_empty() {
        return Err(Error::Argument("empty N list".into()));
    }
    if cfg.n_list.windows(2).any(|p| p[1] <= p[0]) {
        return Err(Error::Argument("N list must be ascending".into()));
    }
    if cfg.n_list[0] < 16 {
        return Err(Error::Argument(
            "N list entries must be >= 16 (smaller scales are pre-asymptotic)".into(),
        ));
    }
    let space = transform.space();
    let phase = Phase::power_law(cfg.a)?;
    let mut per_point = Vec::new();
    let mut h_norms = Vec::new();
    let mut t_norms = Vec::new();
    for &n in &cfg.n_list {
        let spec = CounterexampleSpec::new(space, cfg.a, n, cfg.epsilon, cfg.beta)?
            .with_nodes(cfg.spectral_nodes);
        let spectrum = build_counterexample(&spec)?;
        let h_norm = sobolev_norm(
            space,
            &spectrum,
            SobolevKind::Inhomogeneous { beta: cfg.beta },
        )?;
        let (lo, hi) = spec.annulus();
        let annulus = RadialGrid::gauss_panels(lo, hi, cfg.annulus_nodes.div_ceil(16), 16)?;
        let times: Vec<f64> = annulus
            .radii()
            .iter()
            .map(|&s| spec.time_of_radius(s))
            .collect();
        let choice = TimeChoice::function_of_radius(annulus.radii().to_vec(), times)?;
        let lin = (|| -> Result<Vec<Complex64>> {
            let prop = Propagator::new(
                transform.evaluator(),
                &spectrum.grid,
                annulus.radii(),
                c_inv,
            )?;
            prop.linearized(&spectrum, &phase, &choice)
        })()
        .map_err(|e| Error::Numerical(format!("N = {n}: {e}")))?;
        let t_norm = radial_l2_norm(space, &annulus, &lin)?;
        per_point.push(json!({
            "n": n,
            "sobolev_norm": h_norm,
            "t_norm": t_norm,
            "ratio": t_norm / h_norm,
        }));
        h_norms.push(h_norm);
        t_norms.push(t_norm);
    }
    let ns: Vec<f64> = cfg.n_list.iter().map(|&n| n as f64).collect();
    let (slope, residual) = fit_loglog(&ns, &h_norms)?;
    let target = cfg.beta - cfg.a / 4.0;
    let slope_ok = (slope - target).abs() <= cfg.slope_tolerance;
    let t_min = t_norms.iter().cloned().fold(f64::INFINITY, f64::min);
    let t_median = median(&t_norms);
    let no_decay = t_min >= 0.5 * t_median;
    let sup_ratio = h_norms
        .iter()
        .zip(&t_norms)
        .map(|(h, t)| t / h)
        .fold(0.0f64, f64::max);
    Ok(ExperimentReport {
        inputs: json!({"space": space, "config": cfg}),
        per_point,
        slope: Some(slope),
        slope_residual: Some(residual),
        sup_ratio: Some(sup_ratio),
        pass: slope_ok && no_decay,
        criterion: format!(
            "sobolev slope within {} of beta - a/4 = {target}; min T-norm >= half median",
            cfg.slope_tolerance
        ),
        runtime_seconds: start.elapsed().as_secs_f64(),
    })
}

// ---------------------------------------------------------------------------
// Maximal boundedness ratio above the threshold
// ---------------------------------------------------------------------------

/// Configuration of [`maximal_ratio_run`].
#[derive(Clone, Debug, serde::Serialize)]
pub struct MaximalRatioConfig {
    pub a: f64,
    pub beta: f64,
    pub n_list: Vec<u32>,
    pub epsilon: f64,
    pub radius: f64,
    pub t_nodes: usize,
    pub spectral_nodes: usize,
    pub drift_tolerance: f64,
    pub require_nonincreasing: bool,
}

impl MaximalRatioConfig {
    pub fn new(a: f64, beta: f64, n_list: Vec<u32>, epsilon: f64, radius: f64) -> Self {
        Self {
            a,
            beta,
            n_list,
            epsilon,
            radius,
            t_nodes: 256,
            spectral_nodes: 256,
            drift_tolerance: 0.02,
            require_nonincreasing: true,
        }
    }
}

/// Boundedness experiment for `beta > a/4`: the ratio
/// `||S* f_N||_{L^2(B_R)} / ||f_N||_{H^beta}` per family member, its
/// stability under time-grid refinement (the refined grid is a superset, so
/// each norm can only grow), and its trend in `N`.
pub fn maximal_ratio_run(
    transform: &Transform,
    cfg: &MaximalRatioConfig,
) -> Result<ExperimentReport> {
    let start = Instant::now();
    let c_inv = require_calibrated(transform)?;
    if cfg.n_list.is_empty() {
        return Err(Error::Argument("empty family".into()));
    }
    if cfg.beta <= cfg.a / 4.0 {
        return Err(Error::Precondition(format!(
            "maximal ratio run needs beta > a/4, got beta = {} with a = {}",
            cfg.beta, cfg.a
        )));
    }
    if !(cfg.radius > 0.0) {
        return Err(Error::Argument("ball radius must be positive".into()));
    }
    let space = transform.space();
    let phase = Phase::power_law(cfg.a)?;
    let t_base = log_time_grid(cfg.t_nodes);
    let t_fine = refine_time_grid(&t_base);
    let mut per_point = Vec::new();
    let mut ratios = Vec::new();
    let mut max_drift = 0.0f64;
    for &n in &cfg.n_list {
        let spec = CounterexampleSpec::new(space, cfg.a, n, cfg.epsilon, cfg.beta)?
            .with_nodes(cfg.spectral_nodes);
        let spectrum = build_counterexample(&spec)?;
        let h_norm = sobolev_norm(
            space,
            &spectrum,
            SobolevKind::Inhomogeneous { beta: cfg.beta },
        )?;
        let ball = RadialGrid::for_oscillation(0.0, cfg.radius, spectrum.grid.lambda_max())?;
        let prop = Propagator::new(transform.evaluator(), &spectrum.grid, ball.radii(), c_inv)
            .map_err(|e| Error::Numerical(format!("N = {n}: {e}")))?;
        let coarse = prop.maximal(&spectrum, &phase, &t_base)?;
        let fine = prop.maximal(&spectrum, &phase, &t_fine)?;
        let norm_coarse = l2_of_reals(space, &ball, &coarse)?;
        let norm_fine = l2_of_reals(space, &ball, &fine)?;
        let drift = (norm_fine - norm_coarse) / norm_coarse;
        max_drift = max_drift.max(drift);
        let ratio = norm_fine / h_norm;
        per_point.push(json!({
            "n": n,
            "ratio": ratio,
            "ratio_coarse": norm_coarse / h_norm,
            "drift": drift,
        }));
        ratios.push(ratio);
    }
    let (slope, residual) = if ratios.len() >= 2 {
        let ns: Vec<f64> = cfg.n_list.iter().map(|&n| n as f64).collect();
        let (s, r) = fit_loglog(&ns, &ratios)?;
        (Some(s), Some(r))
    } else {
        (None, None)
    };
    let drift_ok = max_drift < cfg.drift_tolerance;
    let trend_ok = !cfg.require_nonincreasing || slope.is_none_or(|s| s <= 0.0);
    let sup_ratio = ratios.iter().cloned().fold(0.0f64, f64::max);
    Ok(ExperimentReport {
        inputs: json!({"space": space, "config": cfg}),
        per_point,
        slope,
        slope_residual: residual,
        sup_ratio: Some(sup_ratio),
        pass: drift_ok && trend_ok,
        criterion: format!(
            "max ratio stable under time-grid refinement (drift < {}){}",
            cfg.drift_tolerance,
            if cfg.require_nonincreasing {
                " and non-increasing in N"
            } else {
                ""
            }
        ),
        runtime_seconds: start.elapsed().as_secs_f64(),
    })
}

// ---------------------------------------------------------------------------
// Uniform oscillatory kernel bound
// ---------------------------------------------------------------------------

/// Configuration of [`oscillatory_bound_check`].
#[derive(Clone, Debug, serde::Serialize)]
pub struct OscillatoryConfig {
    pub a: f64,
    pub beta: f64,
    pub n_list: Vec<u32>,
    pub epsilon_list: Vec<f64>,
    pub x_grid: Vec<f64>,
    /// `N` values up to this bound form the baseline sup; the pass condition
    /// compares against the sup over the full list.
    pub base_max_n: u32,
    pub stability_tolerance: f64,
}

impl OscillatoryConfig {
    pub fn new(a: f64, beta: f64) -> Self {
        let x_grid = (0..=24)
            .map(|k| 0.01 * (100.0f64 / 0.01).powf(k as f64 / 24.0))
            .collect();
        Self {
            a,
            beta,
            n_list: vec![16, 32, 64, 128, 256, 512],
            epsilon_list: vec![-1.0, 0.0, 1.0],
            x_grid,
            base_max_n: 128,
            stability_tolerance: 0.05,
        }
    }
}

/// The kernel integral
/// `I(x; eps, N) = integral over R of e^{i(x xi + eps |xi|^a)} |xi|^{-2 beta}
///  chi(xi / N) d xi`,
/// by oscillation-aware composite quadrature: the singular piece over
/// `(0, 1]` is flattened by the substitution `u = xi^{1-2 beta}` and the
/// rest is paneled against the local phase rate. Every integral is computed
/// at two resolutions; disagreement is a quadrature failure naming the
/// offending point.
pub fn oscillatory_kernel_integral(
    a: f64,
    beta: f64,
    chi: &BumpFunction,
    n: u32,
    epsilon: f64,
    x: f64,
) -> Result<Complex64> {
    if x == 0.0 {
        return Err(Error::Argument("the kernel bound requires x != 0".into()));
    }
    let coarse = kernel_quadrature(a, beta, chi, n, epsilon, x, 1.0);
    let fine = kernel_quadrature(a, beta, chi, n, epsilon, x, 1.6);
    let scale = fine.norm().max(1e-6);
    if (coarse - fine).norm() > 1e-6 * scale {
        return Err(Error::Numerical(format!(
            "kernel quadrature did not converge at (x, eps, N) = ({x}, {epsilon}, {n}): {} vs {}",
            coarse, fine
        )));
    }
    Ok(fine)
}

fn kernel_quadrature(
    a: f64,
    beta: f64,
    chi: &BumpFunction,
    n: u32,
    epsilon: f64,
    x: f64,
    resolution: f64,
) -> Complex64 {
    // even integrand in xi after folding: 2 * int_0^{2N} cos(x xi)
    // e^{i eps xi^a} xi^{-2 beta} chi(xi/N) d xi
    let nf = n as f64;
    let hi = nf * chi.support_halfwidth(); // chi(xi/N) vanishes past here
    let integrand = |xi: f64| -> Complex64 {
        let amp = (x * xi).cos() * chi.eval(xi / nf);
        let phase = epsilon * xi.powf(a);
        Complex64::new(amp * phase.cos(), amp * phase.sin())
    };
    let mut total = Complex64::new(0.0, 0.0);

    // singular region (0, 1] under u = xi^(1 - 2 beta)
    let gamma = 1.0 / (1.0 - 2.0 * beta);
    let cut = hi.min(1.0);
    let u_hi = cut.powf(1.0 - 2.0 * beta);
    let rate1 = gamma * (x.abs() + epsilon.abs() * a + 1.0);
    let nodes1 = ((10.0 * rate1 / (2.0 * std::f64::consts::PI))
        .ceil()
        .max(128.0)
        * resolution) as usize;
    let (us, ws) = composite_gauss(0.0, u_hi, nodes1.div_ceil(16), 16);
    for (&u, &w) in us.iter().zip(&ws) {
        total += integrand(u.powf(gamma)) * (gamma * w);
    }

    // smooth region [1, 2N]
    if hi > 1.0 {
        let rate2 = x.abs() + epsilon.abs() * a + 1.0;
        let phase_span = rate2 * (hi - 1.0);
        let nodes2 = ((10.0 * phase_span / (2.0 * std::f64::consts::PI))
            .ceil()
            .max(128.0)
            * resolution) as usize;
        let (xs, ws) = composite_gauss(1.0, hi, nodes2.div_ceil(16), 16);
        for (&xi, &w) in xs.iter().zip(&ws) {
            total += integrand(xi) * (xi.powf(-2.0 * beta) * w);
        }
    }
    2.0 * total
}

/// Sweeps `|I(x; eps, N)| / (|x|^{-c1} + |x|^{-c2})` over the configured
/// `(eps, N, x)` box and checks that the sup does not grow when the `N`
/// range is extended beyond `base_max_n`.
pub fn oscillatory_bound_check(cfg: &OscillatoryConfig) -> Result<ExperimentReport> {
    let start = Instant::now();
    let w = walther_constants(cfg.a, cfg.beta)?;
    if cfg.n_list.is_empty() || cfg.epsilon_list.is_empty() || cfg.x_grid.is_empty() {
        return Err(Error::Argument("empty sweep axis".into()));
    }
    if cfg.n_list.windows(2).any(|p| p[1] <= p[0]) {
        return Err(Error::Argument("N list must be ascending".into()));
    }
    if cfg.x_grid.iter().any(|&x| x == 0.0 || !x.is_finite()) {
        return Err(Error::Argument("x grid must avoid 0".into()));
    }
    let chi = BumpFunction::chi();
    let mut per_point = Vec::new();
    let mut sup_base = 0.0f64;
    let mut sup_full = 0.0f64;
    for &eps in &cfg.epsilon_list {
        for &n in &cfg.n_list {
            let mut sup_x = 0.0f64;
            let mut at_x = cfg.x_grid[0];
            for &x in &cfg.x_grid {
                let i = oscillatory_kernel_integral(cfg.a, cfg.beta, &chi, n, eps, x)?;
                let bound = x.abs().powf(-w.c1) + x.abs().powf(-w.c2);
                let ratio = i.norm() / bound;
                if ratio > sup_x {
                    sup_x = ratio;
                    at_x = x;
                }
            }
            per_point.push(json!({
                "epsilon": eps,
                "n": n,
                "sup_ratio": sup_x,
                "at_x": at_x,
            }));
            if n <= cfg.base_max_n {
                sup_base = sup_base.max(sup_x);
            }
            sup_full = sup_full.max(sup_x);
        }
    }
    let growth = (sup_full - sup_base) / sup_base;
    Ok(ExperimentReport {
        inputs: json!({"config": cfg, "c1": w.c1, "c2": w.c2}),
        per_point,
        slope: None,
        slope_residual: None,
        sup_ratio: Some(sup_full),
        pass: sup_base > 0.0 && growth < cfg.stability_tolerance,
        criterion: format!(
            "sup |I|/(x^-c1 + x^-c2) grows < {} when N extends past {}",
            cfg.stability_tolerance, cfg.base_max_n
        ),
        runtime_seconds: start.elapsed().as_secs_f64(),
    })
}

// ---------------------------------------------------------------------------
// Weighted Fourier-norm check
// ---------------------------------------------------------------------------

/// Configuration of [`pitt_check`]: weight exponent and the bump family
/// `(center, width)`; center 0 puts the bump at the origin, other members
/// must stay supported away from it.
#[derive(Clone, Debug, serde::Serialize)]
pub struct PittConfig {
    pub alpha: f64,
    pub family: Vec<(f64, f64)>,
    pub stability_factor: f64,
}

impl PittConfig {
    pub fn new(alpha: f64) -> Self {
        Self {
            alpha,
            family: vec![(0.0, 1.0), (1.5, 0.5), (1.5, 0.2), (1.5, 0.1), (1.5, 0.05)],
            stability_factor: 10.0,
        }
    }
}

/// Checks the one-dimensional weighted inequality at `p = 2`
/// (`alpha_1 = alpha`): the ratio of the `|xi|^{-2 alpha}`-weighted spectral
/// norm to the `|x|^{2 alpha}`-weighted spatial norm stays finite and stable
/// across the bump family. At `alpha = 0` the ratio is exactly `sqrt(2 pi)`
/// for every function, which is enforced.
pub fn pitt_check(cfg: &PittConfig) -> Result<ExperimentReport> {
    let start = Instant::now();
    if !(cfg.alpha >= 0.0 && cfg.alpha < 0.5) {
        return Err(Error::Precondition(format!(
            "weight exponent must satisfy 0 <= alpha < 1/2, got {}",
            cfg.alpha
        )));
    }
    if cfg.family.is_empty() {
        return Err(Error::Argument("empty test family".into()));
    }
    let mut per_point = Vec::new();
    let mut ratios = Vec::new();
    for &(center, width) in &cfg.family {
        let ratio = pitt_ratio(cfg.alpha, center, width)?;
        per_point.push(json!({"center": center, "width": width, "ratio": ratio}));
        ratios.push(ratio);
    }
    let max = ratios.iter().cloned().fold(0.0f64, f64::max);
    let min = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let all_finite = ratios.iter().all(|r| r.is_finite() && *r > 0.0);
    let stable = max <= cfg.stability_factor * min;
    let plancherel_exact = if cfg.alpha == 0.0 {
        let sqrt_2pi = (2.0 * std::f64::consts::PI).sqrt();
        ratios
            .iter()
            .all(|r| (r - sqrt_2pi).abs() < 1e-6 * sqrt_2pi)
    } else {
        true
    };
    Ok(ExperimentReport {
        inputs: json!({"config": cfg}),
        per_point,
        slope: None,
        slope_residual: None,
        sup_ratio: Some(max),
        pass: all_finite && stable && plancherel_exact,
        criterion: format!(
            "weighted-norm ratios finite and within a factor {} across the family{}",
            cfg.stability_factor,
            if cfg.alpha == 0.0 {
                "; alpha = 0 reproduces the unweighted identity"
            } else {
                ""
            }
        ),
        runtime_seconds: start.elapsed().as_secs_f64(),
    })
}

fn pitt_ratio(alpha: f64, center: f64, width: f64) -> Result<f64> {
    if !(width > 0.0) || center < 0.0 {
        return Err(Error::Argument(format!(
            "bad bump parameters ({center}, {width})"
        )));
    }
    if center > 0.0 && center - width <= 1e-3 {
        return Err(Error::Argument(
            "off-center bumps must stay supported away from the origin".into(),
        ));
    }
    let bump = BumpFunction::eta();
    let h = |x: f64| bump.eval((x.abs() - center) / width);
    let (x_lo, x_hi) = ((center - width).max(0.0), center + width);

    // spatial side: 2 * int h^2 x^(2 alpha) dx over the support
    let (xs, ws) = composite_gauss(x_lo, x_hi, 32, 16);
    let spatial_sq: f64 = xs
        .iter()
        .zip(&ws)
        .map(|(&x, &w)| {
            let v = h(x);
            2.0 * v * v * x.powf(2.0 * alpha) * w
        })
        .sum();

    // transform h~(xi) = 2 * int h(x) cos(x xi) dx on a reusable rule
    let xi_max: f64 = 120.0 / width;
    let x_nodes =
        ((10.0 * 2.0 * width * xi_max / (2.0 * std::f64::consts::PI)).ceil() as usize).max(256);
    let (hx, hw) = composite_gauss(x_lo, x_hi, x_nodes.div_ceil(16), 16);
    let hv: Vec<f64> = hx.iter().map(|&x| h(x)).collect();
    let transform = |xi: f64| -> f64 {
        let mut acc = 0.0;
        for ((&x, &w), &v) in hx.iter().zip(&hw).zip(&hv) {
            acc += v * (x * xi).cos() * w;
        }
        2.0 * acc
    };

    // spectral side: the singular piece over (0, 1] is flattened by
    // u = xi^(1 - 2 alpha); the rest gets oscillation-aware panels
    let gamma = 1.0 / (1.0 - 2.0 * alpha);
    let rate0 = (center + width) * gamma + 1.0;
    let nodes0 = ((10.0 * rate0 / (2.0 * std::f64::consts::PI)).ceil() as usize).max(128);
    let (g_nodes, g_weights) = composite_gauss(0.0, 1.0, nodes0.div_ceil(16), 16);
    let mut spectral_sq = 0.0;
    for (&u, &w) in g_nodes.iter().zip(&g_weights) {
        let t = transform(u.powf(gamma));
        spectral_sq += 2.0 * t * t * gamma * w;
    }
    let rate = center + width;
    let nodes = ((10.0 * rate * xi_max / (2.0 * std::f64::consts::PI)).ceil() as usize).max(128);
    let (s_nodes, s_weights) = composite_gauss(1.0, xi_max, nodes.div_ceil(16), 16);
    for (&xi, &w) in s_nodes.iter().zip(&s_weights) {
        let t = transform(xi);
        spectral_sq += 2.0 * t * t * xi.powf(-2.0 * alpha) * w;
    }
    Ok((spectral_sq / spatial_sq).sqrt())
}

// ---------------------------------------------------------------------------
// Small-time convergence
// ---------------------------------------------------------------------------

/// Configuration of [`convergence_run`].
#[derive(Clone, Debug, serde::Serialize)]
pub struct ConvergenceConfig {
    pub radius: f64,
    pub t_sequence: Vec<f64>,
    pub radial_nodes: usize,
}

impl ConvergenceConfig {
    pub fn new(radius: f64, t_sequence: Vec<f64>) -> Self {
        Self {
            radius,
            t_sequence,
            radial_nodes: 128,
        }
    }
}

/// Tracks `sup_{s <= R} |u(s, t_k) - f(s)|` along a time sequence headed to
/// zero; passes when the tail is non-increasing and the final gap has
/// dropped well below the initial one (toward quadrature noise).
pub fn convergence_run(
    transform: &Transform,
    spectrum: &crate::spectral::Spectrum,
    phase: &Phase,
    cfg: &ConvergenceConfig,
) -> Result<ExperimentReport> {
    let start = Instant::now();
    let c_inv = require_calibrated(transform)?;
    if cfg.t_sequence.is_empty() {
        return Err(Error::Argument("empty time sequence".into()));
    }
    if cfg.t_sequence.iter().any(|&t| !(t > 0.0 && t < 1.0)) {
        return Err(Error::Precondition("times must lie in (0, 1)".into()));
    }
    if cfg.t_sequence.windows(2).any(|p| p[1] > p[0]) {
        return Err(Error::Argument(
            "time sequence must be non-increasing".into(),
        ));
    }
    let ball = RadialGrid::for_oscillation(0.0, cfg.radius, spectrum.grid.lambda_max())?;
    let radii: Vec<f64> = ball.radii().to_vec();
    let prop = Propagator::new(transform.evaluator(), &spectrum.grid, &radii, c_inv)?;
    let reference = prop.propagate(spectrum, phase, 0.0)?;
    let mut per_point = Vec::new();
    let mut diffs = Vec::new();
    for &t in &cfg.t_sequence {
        let u = prop.propagate(spectrum, phase, t)?;
        let sup = u
            .iter()
            .zip(&reference)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0f64, f64::max);
        per_point.push(json!({"t": t, "sup_diff": sup}));
        diffs.push(sup);
    }
    let tail = diffs.len().div_ceil(2).max(3.min(diffs.len()));
    let tail_ok = diffs[diffs.len() - tail..]
        .windows(2)
        .all(|p| p[1] <= p[0] * (1.0 + 1e-6) + 1e-300);
    let shrunk = diffs[diffs.len() - 1] <= 0.2 * diffs[0] + 1e-300;
    Ok(ExperimentReport {
        inputs: json!({"space": transform.space(), "config": cfg}),
        per_point,
        slope: None,
        slope_residual: None,
        sup_ratio: None,
        pass: tail_ok && shrunk,
        criterion: "sup |u(t_k) - f| non-increasing on the tail and well below its start".into(),
        runtime_seconds: start.elapsed().as_secs_f64(),
    })
}

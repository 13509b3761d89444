//! Adaptive Dormand-Prince 5(4) integration for two-component systems.
//!
//! This is the workhorse behind the spherical-function evaluator: a single
//! second-order equation written as a first-order pair, integrated with an
//! embedded error estimate, PI step control and exact landing on the
//! requested output points.

use crate::error::{Error, Result};

/// Options for [`integrate_path`].
#[derive(Clone, Copy, Debug)]
pub struct Rk45Options {
    /// Relative tolerance of the embedded error estimate.
    pub rtol: f64,
    /// Absolute tolerance of the embedded error estimate.
    pub atol: f64,
    /// Hard cap on the step size.
    pub h_max: f64,
}

const SAFETY: f64 = 0.9;
const MIN_SHRINK: f64 = 0.2;
const MAX_GROW: f64 = 5.0;

/// Integrates `y' = f(t, y)` from `t0` with state `y0`, returning the state
/// at every point of `outputs` (which must be ascending and `>= t0`).
/// Steps are clipped so each output point is hit exactly.
pub fn integrate_path<F>(
    f: F,
    t0: f64,
    y0: [f64; 2],
    outputs: &[f64],
    opts: Rk45Options,
) -> Result<Vec<[f64; 2]>>
where
    F: Fn(f64, [f64; 2]) -> [f64; 2],
{
    let mut results = Vec::with_capacity(outputs.len());
    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, y);
    let mut h = opts.h_max.min(1e-3);

    for &target in outputs {
        if target < t0 {
            return Err(Error::Argument(format!(
                "output point {target} precedes integration start {t0}"
            )));
        }
        while t < target {
            let remaining = target - t;
            let clipped = remaining <= h.min(opts.h_max);
            let mut step = h.min(opts.h_max).min(remaining);
            loop {
                if !(step > 0.0) || t + step == t {
                    return Err(Error::Numerical(format!(
                        "step size underflow near s = {t:.6e}"
                    )));
                }
                let (y5, y4, k_last) = dopri_step(&f, t, y, k1, step);
                let mut err: f64 = 0.0;
                for i in 0..2 {
                    let scale = opts.atol + opts.rtol * y[i].abs().max(y5[i].abs());
                    err = err.max((y5[i] - y4[i]).abs() / scale);
                }
                if !err.is_finite() {
                    return Err(Error::Numerical(format!(
                        "non-finite state near s = {t:.6e}"
                    )));
                }
                if err <= 1.0 {
                    t += step;
                    y = y5;
                    k1 = k_last; // FSAL
                    let factor = if err == 0.0 {
                        MAX_GROW
                    } else {
                        (SAFETY * err.powf(-0.2)).clamp(MIN_SHRINK, MAX_GROW)
                    };
                    let grown = (step * factor).min(opts.h_max);
                    // a step shortened only to land on an output point says
                    // nothing about the error-limited step size; keep h
                    h = if clipped { h.max(grown) } else { grown };
                    break;
                }
                step *= (SAFETY * err.powf(-0.2)).clamp(MIN_SHRINK, 1.0);
            }
        }
        results.push(y);
    }
    Ok(results)
}

/// One Dormand-Prince 5(4) step; returns (5th order, 4th order, FSAL slope).
#[allow(clippy::many_single_char_names)]
fn dopri_step<F>(f: &F, t: f64, y: [f64; 2], k1: [f64; 2], h: f64) -> ([f64; 2], [f64; 2], [f64; 2])
where
    F: Fn(f64, [f64; 2]) -> [f64; 2],
{
    #[inline]
    fn axpy(y: [f64; 2], h: f64, terms: &[(f64, [f64; 2])]) -> [f64; 2] {
        let mut out = y;
        for &(c, k) in terms {
            out[0] += h * c * k[0];
            out[1] += h * c * k[1];
        }
        out
    }

    let k2 = f(t + h / 5.0, axpy(y, h, &[(1.0 / 5.0, k1)]));
    let k3 = f(
        t + 3.0 * h / 10.0,
        axpy(y, h, &[(3.0 / 40.0, k1), (9.0 / 40.0, k2)]),
    );
    let k4 = f(
        t + 4.0 * h / 5.0,
        axpy(
            y,
            h,
            &[(44.0 / 45.0, k1), (-56.0 / 15.0, k2), (32.0 / 9.0, k3)],
        ),
    );
    let k5 = f(
        t + 8.0 * h / 9.0,
        axpy(
            y,
            h,
            &[
                (19372.0 / 6561.0, k1),
                (-25360.0 / 2187.0, k2),
                (64448.0 / 6561.0, k3),
                (-212.0 / 729.0, k4),
            ],
        ),
    );
    let k6 = f(
        t + h,
        axpy(
            y,
            h,
            &[
                (9017.0 / 3168.0, k1),
                (-355.0 / 33.0, k2),
                (46732.0 / 5247.0, k3),
                (49.0 / 176.0, k4),
                (-5103.0 / 18656.0, k5),
            ],
        ),
    );
    let y5 = axpy(
        y,
        h,
        &[
            (35.0 / 384.0, k1),
            (500.0 / 1113.0, k3),
            (125.0 / 192.0, k4),
            (-2187.0 / 6784.0, k5),
            (11.0 / 84.0, k6),
        ],
    );
    let k7 = f(t + h, y5);
    let y4 = axpy(
        y,
        h,
        &[
            (5179.0 / 57600.0, k1),
            (7571.0 / 16695.0, k3),
            (393.0 / 640.0, k4),
            (-92097.0 / 339200.0, k5),
            (187.0 / 2100.0, k6),
            (1.0 / 40.0, k7),
        ],
    );
    (y5, y4, k7)
}

//! Monotone cubic (Fritsch-Carlson) interpolation.
//!
//! Used for tabulated phase functions and radius-dependent time tables;
//! the monotone limiter keeps interpolated phases free of spurious
//! oscillation between nodes.

use crate::error::{Error, Result};

/// A C^1 piecewise-cubic interpolant that preserves monotonicity of the data.
#[derive(Clone, Debug)]
pub struct MonotoneCubic {
    x: Vec<f64>,
    y: Vec<f64>,
    slope: Vec<f64>,
}

impl MonotoneCubic {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() || x.len() < 2 {
            return Err(Error::Argument(
                "interpolation needs at least two matching nodes".into(),
            ));
        }
        if x.windows(2).any(|p| p[1] <= p[0]) {
            return Err(Error::Argument(
                "interpolation nodes must be strictly ascending".into(),
            ));
        }
        if x.iter().chain(y.iter()).any(|v| !v.is_finite()) {
            return Err(Error::Argument("interpolation data must be finite".into()));
        }
        let n = x.len();
        let mut d = vec![0.0; n - 1]; // secant slopes
        for i in 0..n - 1 {
            d[i] = (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
        }
        let mut slope = vec![0.0; n];
        slope[0] = d[0];
        slope[n - 1] = d[n - 2];
        for i in 1..n - 1 {
            slope[i] = if d[i - 1] * d[i] <= 0.0 {
                0.0
            } else {
                0.5 * (d[i - 1] + d[i])
            };
        }
        // Fritsch-Carlson limiter
        for i in 0..n - 1 {
            if d[i] == 0.0 {
                slope[i] = 0.0;
                slope[i + 1] = 0.0;
            } else {
                let alpha = slope[i] / d[i];
                let beta = slope[i + 1] / d[i];
                let r = alpha * alpha + beta * beta;
                if r > 9.0 {
                    let tau = 3.0 / r.sqrt();
                    slope[i] = tau * alpha * d[i];
                    slope[i + 1] = tau * beta * d[i];
                }
            }
        }
        Ok(Self { x, y, slope })
    }

    /// Evaluates the interpolant; clamps to the end values outside the table.
    pub fn eval(&self, at: f64) -> f64 {
        let n = self.x.len();
        if at <= self.x[0] {
            return self.y[0];
        }
        if at >= self.x[n - 1] {
            return self.y[n - 1];
        }
        let i = match self.x.binary_search_by(|v| v.partial_cmp(&at).unwrap()) {
            Ok(i) => return self.y[i],
            Err(i) => i - 1,
        };
        let h = self.x[i + 1] - self.x[i];
        let t = (at - self.x[i]) / h;
        let (t2, t3) = (t * t, t * t * t);
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.y[i]
            + h10 * h * self.slope[i]
            + h01 * self.y[i + 1]
            + h11 * h * self.slope[i + 1]
    }
}

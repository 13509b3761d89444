//! Structured experiment results and the shared slope-fitting helper.

use crate::error::{Error, Result};

/// Structured result of a harness run. Serializes to JSON with a fixed field
/// order; `runtime_seconds` is the only field that varies between reruns of
/// an identical configuration.
#[derive(Clone, Debug, serde::Serialize)]
pub struct ExperimentReport {
    /// Echo of the resolved configuration.
    pub inputs: serde_json::Value,
    /// One row per sweep point (per N, per x, ...).
    pub per_point: Vec<serde_json::Value>,
    /// Fitted log-log slope, when the harness fits one.
    pub slope: Option<f64>,
    /// RMS residual of the slope fit.
    pub slope_residual: Option<f64>,
    /// Supremum ratio reported by the harness, when applicable.
    pub sup_ratio: Option<f64>,
    /// Whether the stated criterion passed.
    pub pass: bool,
    /// The criterion this report tests, spelled out.
    pub criterion: String,
    /// Wall-clock runtime; metadata, excluded from determinism comparisons.
    pub runtime_seconds: f64,
}

impl ExperimentReport {
    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }

    /// Copy with the runtime zeroed; two runs of the same configuration must
    /// agree byte-for-byte after this redaction.
    pub fn with_runtime_redacted(&self) -> Self {
        let mut r = self.clone();
        r.runtime_seconds = 0.0;
        r
    }
}

/// Least-squares slope of `log y` against `log x` over the largest
/// two-thirds of the points (the small-x entries are pre-asymptotic).
/// Returns `(slope, rms_residual)`.
pub fn fit_loglog(xs: &[f64], ys: &[f64]) -> Result<(f64, f64)> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::Argument(
            "slope fit needs at least two points".into(),
        ));
    }
    if xs
        .iter()
        .chain(ys.iter())
        .any(|v| !(*v > 0.0) || !v.is_finite())
    {
        return Err(Error::Argument(
            "slope fit needs positive finite data".into(),
        ));
    }
    let keep = (2 * xs.len()).div_ceil(3).max(2);
    let skip = xs.len() - keep;
    let lx: Vec<f64> = xs[skip..].iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys[skip..].iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::Argument("slope fit needs distinct abscissae".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = lx
        .iter()
        .zip(&ly)
        .map(|(x, y)| {
            let r = y - (slope * x + intercept);
            r * r
        })
        .sum();
    Ok((slope, (ss / n).sqrt()))
}

/// Median of a nonempty slice (average of the middle pair for even length).
pub fn median(values: &[f64]) -> f64 {
    assert!(!values.is_empty());
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

//! Smooth compactly supported cutoff profiles.

use crate::error::{Error, Result};

/// An even C-infinity bump: identically 1 on `[-plateau, plateau]`,
/// identically 0 outside `(-support, support)`, values in `[0, 1]`, with the
/// transition built from the standard `exp(-1/u)` smooth step (one fixed
/// choice, so runs are reproducible).
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct BumpFunction {
    plateau_halfwidth: f64,
    support_halfwidth: f64,
}

impl BumpFunction {
    pub fn new(plateau_halfwidth: f64, support_halfwidth: f64) -> Result<Self> {
        if !(plateau_halfwidth > 0.0 && support_halfwidth > plateau_halfwidth)
            || !support_halfwidth.is_finite()
        {
            return Err(Error::Argument(format!(
                "need 0 < plateau < support, got ({plateau_halfwidth}, {support_halfwidth})"
            )));
        }
        Ok(Self {
            plateau_halfwidth,
            support_halfwidth,
        })
    }

    /// The low-frequency cutoff: plateau 1/2, support 1.
    pub fn eta() -> Self {
        Self {
            plateau_halfwidth: 0.5,
            support_halfwidth: 1.0,
        }
    }

    /// The kernel-bound cutoff: plateau 1, support 2.
    pub fn chi() -> Self {
        Self {
            plateau_halfwidth: 1.0,
            support_halfwidth: 2.0,
        }
    }

    pub fn plateau_halfwidth(&self) -> f64 {
        self.plateau_halfwidth
    }

    pub fn support_halfwidth(&self) -> f64 {
        self.support_halfwidth
    }

    pub fn eval(&self, x: f64) -> f64 {
        let y = x.abs();
        if y <= self.plateau_halfwidth {
            1.0
        } else if y >= self.support_halfwidth {
            0.0
        } else {
            // u runs 1 -> 0 across the transition band
            let u =
                (self.support_halfwidth - y) / (self.support_halfwidth - self.plateau_halfwidth);
            smooth_step(u)
        }
    }
}

/// C-infinity monotone step: 0 at 0, 1 at 1, flat to all orders at both ends.
fn smooth_step(u: f64) -> f64 {
    fn g(v: f64) -> f64 {
        if v <= 0.0 {
            0.0
        } else {
            (-1.0 / v).exp()
        }
    }
    let a = g(u);
    let b = g(1.0 - u);
    a / (a + b)
}

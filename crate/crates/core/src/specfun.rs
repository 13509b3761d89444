//! Structural parameters of the space, the volume density `A(s)`, and the
//! scalar special functions everything else consumes: the principal-branch
//! complex log-Gamma, Bessel functions `J_mu` of half-integer order, and the
//! normalized kernel `script_j` with `script_j(mu, 0) = 1`.
//!
//! All routines here are pure functions of their arguments and are safe to
//! call concurrently.

use crate::error::{Error, Result};
use num_complex::Complex64;

/// Structural integers of a Damek-Ricci space `S = NA`: `m_v` is the
/// dimension of the complement `v` (even; 0 selects the degenerate real
/// hyperbolic case), `m_z` the dimension of the center `z`. The manifold
/// dimension is `n = m_v + m_z + 1` and the homogeneous dimension is
/// `Q = m_v/2 + m_z`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct SpaceParams {
    m_v: u32,
    m_z: u32,
}

impl SpaceParams {
    pub fn new(m_v: u32, m_z: u32) -> Result<Self> {
        if !m_v.is_multiple_of(2) {
            return Err(Error::Argument(format!(
                "m_v must be even (complex structure on v), got {m_v}"
            )));
        }
        if m_z == 0 {
            return Err(Error::Argument("m_z must be positive".into()));
        }
        Ok(Self { m_v, m_z })
    }

    /// Real hyperbolic 3-space: `(m_v, m_z) = (0, 2)`.
    pub fn hyperbolic3() -> Self {
        Self { m_v: 0, m_z: 2 }
    }

    pub fn m_v(&self) -> u32 {
        self.m_v
    }

    pub fn m_z(&self) -> u32 {
        self.m_z
    }

    /// Manifold dimension `n = m_v + m_z + 1`.
    pub fn n(&self) -> u32 {
        self.m_v + self.m_z + 1
    }

    /// Homogeneous dimension `Q = m_v/2 + m_z`.
    pub fn q(&self) -> f64 {
        self.m_v as f64 / 2.0 + self.m_z as f64
    }

    /// The spectral shift `Q^2/4` at the bottom of the Laplacian's spectrum.
    pub fn q2_over_4(&self) -> f64 {
        let q = self.q();
        0.25 * q * q
    }
}

/// Volume density `A(s) = 2^(m_v+m_z) sinh(s/2)^(m_v+m_z) cosh(s/2)^(m_z)`.
///
/// Strictly positive and increasing for `s > 0`, with `A(s)/s^(n-1) -> 1`
/// as `s -> 0+`.
pub fn density(space: SpaceParams, s: f64) -> Result<f64> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::Domain(format!(
            "density requires a positive finite radius, got {s}"
        )));
    }
    let m = (space.m_v + space.m_z) as i32;
    let half = 0.5 * s;
    Ok(2f64.powi(m) * half.sinh().powi(m) * half.cosh().powi(space.m_z as i32))
}

/// Logarithmic derivative `A'(s)/A(s)`; this is the first-order coefficient
/// of the radial Laplace-Beltrami operator.
pub fn density_log_derivative(space: SpaceParams, s: f64) -> f64 {
    let half = 0.5 * s;
    0.5 * (space.m_v + space.m_z) as f64 / half.tanh() + 0.5 * space.m_z as f64 * half.tanh()
}

// ---------------------------------------------------------------------------
// Complex log-Gamma
// ---------------------------------------------------------------------------

// Lanczos approximation, g = 607/128 with 15 coefficients. Relative accuracy
// is ~1e-13 across the half-plane Re(z) >= 0.5; arguments left of that line
// are lifted by the recurrence.
const LANCZOS_G: f64 = 4.742_187_5;
const LANCZOS_C: [f64; 15] = [
    0.999_999_999_999_997_1,
    57.156_235_665_862_92,
    -59.597_960_355_475_49,
    14.136_097_974_741_746,
    -0.491_913_816_097_620_2,
    3.399_464_998_481_189e-5,
    4.652_362_892_704_858e-5,
    -9.837_447_530_487_956e-5,
    1.580_887_032_249_125e-4,
    -2.102_644_417_241_048_8e-4,
    2.174_396_181_152_126_5e-4,
    -1.643_181_065_367_639e-4,
    8.441_822_398_385_275e-5,
    -2.619_083_840_158_140_8e-5,
    3.689_918_265_953_162_5e-6,
];

fn lanczos_log_gamma(z: Complex64) -> Complex64 {
    debug_assert!(z.re >= 0.5);
    let mut acc = Complex64::new(LANCZOS_C[0], 0.0);
    for (k, c) in LANCZOS_C.iter().enumerate().skip(1) {
        acc += c / (z + (k as f64 - 1.0));
    }
    let t = z + (LANCZOS_G - 0.5);
    0.5 * (2.0 * std::f64::consts::PI).ln() + (z - 0.5) * t.ln() - t + acc.ln()
}

/// `log(sin(pi z))`, stable for large `|Im z|` where `sin(pi z)` overflows.
fn log_sin_pi(z: Complex64) -> Complex64 {
    if z.im < 0.0 {
        return log_sin_pi(z.conj()).conj();
    }
    if z.im <= 10.0 {
        return (Complex64::new(std::f64::consts::PI, 0.0) * z).sin().ln();
    }
    // sin(pi z) = -e^{-i pi z} (1 - e^{2 i pi z}) / (2i) for Im z large
    let ipiz = Complex64::new(0.0, std::f64::consts::PI) * z;
    let small = (2.0 * ipiz).exp(); // |.| = e^{-2 pi Im z}, tiny
    -ipiz
        + (Complex64::new(1.0, 0.0) - small).ln()
        + Complex64::new(-(2.0f64.ln()), 0.5 * std::f64::consts::PI)
}

/// Principal-branch `log Gamma(z)`.
///
/// Relative accuracy is about 1e-13 for `|z| <= 1e3`; non-positive integers
/// are rejected as poles.
pub fn log_gamma_complex(z: Complex64) -> Result<Complex64> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::Domain(format!("log_gamma of non-finite input {z}")));
    }
    if z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round() {
        return Err(Error::Pole(format!("Gamma pole at z = {}", z.re)));
    }
    if z.re >= 0.5 {
        return Ok(lanczos_log_gamma(z));
    }
    if z.re >= -60.0 {
        // lift into the Lanczos half-plane; branch ambiguities are multiples
        // of 2*pi*i and vanish under exponentiation
        let shift = (0.5 - z.re).ceil() as usize;
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..shift {
            acc += (z + j as f64).ln();
        }
        return Ok(lanczos_log_gamma(z + shift as f64) - acc);
    }
    // deep left half-plane: reflection
    let pi = std::f64::consts::PI;
    Ok(Complex64::new(pi.ln(), 0.0) - log_sin_pi(z) - log_gamma_complex(1.0 - z)?)
}

/// `log Gamma(x)` for real `x > 0`.
pub fn log_gamma_real(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!(
            "log_gamma_real requires x > 0, got {x}"
        )));
    }
    Ok(log_gamma_complex(Complex64::new(x, 0.0))?.re)
}

/// `Gamma(x)` for real `x > 0`.
pub fn gamma_real(x: f64) -> Result<f64> {
    Ok(log_gamma_real(x)?.exp())
}

// ---------------------------------------------------------------------------
// Bessel functions of half-integer order
// ---------------------------------------------------------------------------

/// A Bessel order in `{0, 1/2, 1, 3/2, ...}`; the orders that occur here are
/// `(n-2)/2 + l`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BesselOrder {
    twice: u32,
}

impl BesselOrder {
    pub fn new(mu: f64) -> Result<Self> {
        let twice = 2.0 * mu;
        if !(mu >= 0.0) || !mu.is_finite() || (twice - twice.round()).abs() > 1e-12 {
            return Err(Error::Argument(format!(
                "Bessel order must be a non-negative half-integer, got {mu}"
            )));
        }
        Ok(Self {
            twice: twice.round() as u32,
        })
    }

    /// Order from its doubled value (`from_twice(3)` is `mu = 3/2`).
    pub fn from_twice(twice: u32) -> Self {
        Self { twice }
    }

    pub fn value(&self) -> f64 {
        self.twice as f64 / 2.0
    }

    /// The integer `m` when the order is an integer, else `None`.
    pub fn integer(&self) -> Option<u32> {
        self.twice.is_multiple_of(2).then_some(self.twice / 2)
    }
}

/// Power series around 0; accurate for `x < 12` (worst-case cancellation
/// there costs ~5 digits, leaving ~1e-10 absolute).
fn bessel_series(mu: f64, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut term = if mu == 0.0 {
        1.0
    } else {
        half.powf(mu) / gamma_real(mu + 1.0).expect("mu + 1 > 0")
    };
    let mut sum = term;
    let q = -half * half;
    for k in 0..200 {
        let kf = k as f64;
        term *= q / ((kf + 1.0) * (mu + kf + 1.0));
        sum += term;
        if term.abs() < 1e-17 * sum.abs().max(1e-30) {
            break;
        }
    }
    sum
}

/// Closed trigonometric forms for half-odd orders via upward recurrence from
/// `J_{1/2}`, `J_{3/2}`; stable for `x` at or above the order.
fn bessel_half_odd(twice: u32, x: f64) -> f64 {
    debug_assert!(twice % 2 == 1);
    let amp = (2.0 / (std::f64::consts::PI * x)).sqrt();
    let j_half = amp * x.sin();
    if twice == 1 {
        return j_half;
    }
    let j_3half = amp * (x.sin() / x - x.cos());
    if twice == 3 {
        return j_3half;
    }
    let (mut prev, mut cur) = (j_half, j_3half);
    let mut t = 3; // doubled order of `cur`
    while t < twice {
        let nu = t as f64 / 2.0;
        let next = (2.0 * nu / x) * cur - prev;
        prev = cur;
        cur = next;
        t += 2;
    }
    cur
}

/// Integral representation for integer orders,
/// `J_n(x) = (1/pi) * integral of cos(n t - x sin t) over [0, pi]`,
/// by trapezoid sums (geometric convergence for this periodic integrand).
fn bessel_integer_integral(n: u32, x: f64) -> f64 {
    let m = 64 + (0.7 * x).ceil() as usize + n as usize;
    let h = std::f64::consts::PI / m as f64;
    let f = |theta: f64| (n as f64 * theta - x * theta.sin()).cos();
    let mut sum = 0.5 * (f(0.0) + f(std::f64::consts::PI));
    for j in 1..m {
        sum += f(j as f64 * h);
    }
    sum / m as f64
}

/// Bessel function `J_mu(x)` for half-integer order and `x >= 0`.
///
/// NaN propagates; negative `x` yields NaN.
pub fn bessel_j(mu: BesselOrder, x: f64) -> f64 {
    if x.is_nan() || x < 0.0 {
        return f64::NAN;
    }
    if x == 0.0 {
        return if mu.twice == 0 { 1.0 } else { 0.0 };
    }
    if x < 12.0 {
        return bessel_series(mu.value(), x);
    }
    match mu.integer() {
        Some(n) => bessel_integer_integral(n, x),
        None => bessel_half_odd(mu.twice, x),
    }
}

/// Normalized Bessel kernel with `script_j(mu, 0) = 1`:
/// `script_j(mu, x) = 2^mu Gamma(mu+1) J_mu(x) / x^mu`.
///
/// For `mu = 1/2` this is `sin(x)/x`. Below `x = 1e-3` the first three terms
/// of the power series are used to avoid the 0/0 form.
pub fn script_j(mu: BesselOrder, x: f64) -> f64 {
    if x.is_nan() || x < 0.0 {
        return f64::NAN;
    }
    let m = mu.value();
    if x < 1e-3 {
        let x2 = x * x;
        return 1.0 - x2 / (4.0 * (m + 1.0)) + x2 * x2 / (32.0 * (m + 1.0) * (m + 2.0));
    }
    if mu.twice == 1 {
        return x.sin() / x;
    }
    let prefactor = 2f64.powf(m) * gamma_real(m + 1.0).expect("mu + 1 > 0");
    prefactor * bessel_j(mu, x) / x.powf(m)
}

//! Scalar special functions: Kummer's confluent hypergeometric function,
//! the modified Bessel function of the first kind, the exponential integral,
//! the scaled upper incomplete gamma function at negative integer order, and
//! regularized incomplete gamma functions of integer shape.
//!
//! All series are accumulated with compensated summation and, where the
//! terms can overflow, with a running logarithmic scale.

use crate::error::{Error, Result};
use crate::numerics::{ln_factorial, ln_gamma, CompensatedSum};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Above this argument, `kummer_1f1` switches to the Kummer transform when
/// the transformed series terminates with all-positive terms.
pub const KUMMER_Z_SWITCH: f64 = 40.0;

const RESCALE_AT: f64 = 1e250;
const FPMIN: f64 = 1e-300;

/// Stopping rule for power series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesControl {
    pub rel_tol: f64,
    pub max_terms: usize,
}

impl Default for SeriesControl {
    fn default() -> Self {
        Self {
            rel_tol: 1e-14,
            max_terms: 1_000_000,
        }
    }
}

impl SeriesControl {
    pub fn new(rel_tol: f64, max_terms: usize) -> Result<Self> {
        if !(rel_tol > 0.0 && rel_tol <= 1e-6) {
            return Err(Error::InvalidParams(format!(
                "rel_tol must lie in (0, 1e-6], got {rel_tol}"
            )));
        }
        if max_terms < 100 {
            return Err(Error::InvalidParams(format!(
                "max_terms must be >= 100, got {max_terms}"
            )));
        }
        Ok(Self { rel_tol, max_terms })
    }
}

/// A sum stored as `mantissa * exp(log_scale)`.
#[derive(Debug, Clone, Copy)]
struct Scaled {
    mantissa: f64,
    log_scale: f64,
}

impl Scaled {
    fn ln_abs(&self) -> f64 {
        self.mantissa.abs().ln() + self.log_scale
    }
}

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x.fract() == 0.0
}

/// Raw power series of 1F1(a; b; z) with no argument transformation.
fn kummer_series(a: f64, b: f64, z: f64, ctl: &SeriesControl) -> Result<Scaled> {
    let mut acc = CompensatedSum::new();
    let mut log_scale = 0.0;
    let mut term = 1.0f64;
    acc.add(term);
    for k in 0..ctl.max_terms {
        let kf = k as f64;
        if a + kf == 0.0 {
            // terminating polynomial
            return Ok(Scaled {
                mantissa: acc.value(),
                log_scale,
            });
        }
        term *= (a + kf) / (b + kf) * z / (kf + 1.0);
        acc.add(term);
        let s = acc.value();
        if s.abs() > RESCALE_AT {
            let mut rescaled = CompensatedSum::new();
            rescaled.add(s / RESCALE_AT);
            acc = rescaled;
            term /= RESCALE_AT;
            log_scale += RESCALE_AT.ln();
        }
        if term == 0.0 {
            return Ok(Scaled {
                mantissa: acc.value(),
                log_scale,
            });
        }
        let next_ratio = ((a + kf + 1.0) / (b + kf + 1.0) * z / (kf + 2.0)).abs();
        if next_ratio < 1.0 {
            let tail = term.abs() * next_ratio / (1.0 - next_ratio);
            if tail <= ctl.rel_tol * acc.value().abs() {
                return Ok(Scaled {
                    mantissa: acc.value(),
                    log_scale,
                });
            }
        }
    }
    Err(Error::NoConvergence {
        what: "kummer_1f1 series",
        terms: ctl.max_terms,
    })
}

/// Routes 1F1(a; b; z) to a well-conditioned series. Returns the scaled
/// value with any `e^z` factor of the Kummer transform folded into the scale.
fn kummer_routed(a: f64, b: f64, z: f64, ctl: &SeriesControl) -> Result<Scaled> {
    if !(a.is_finite() && b.is_finite() && z.is_finite()) {
        return Err(Error::InvalidParams("kummer_1f1 needs finite arguments".into()));
    }
    if is_nonpositive_integer(b) {
        return Err(Error::InvalidParams(format!(
            "kummer_1f1: b = {b} is a nonpositive integer"
        )));
    }
    if z == 0.0 {
        return Ok(Scaled {
            mantissa: 1.0,
            log_scale: 0.0,
        });
    }
    let transform = z < 0.0 || (z > KUMMER_Z_SWITCH && is_nonpositive_integer(b - a));
    if transform {
        let s = kummer_series(b - a, b, -z, ctl)?;
        Ok(Scaled {
            mantissa: s.mantissa,
            log_scale: s.log_scale + z,
        })
    } else {
        kummer_series(a, b, z, ctl)
    }
}

/// Confluent hypergeometric function of the first kind, 1F1(a; b; z).
///
/// Negative arguments go through Kummer's transformation
/// `1F1(a; b; z) = e^z 1F1(b - a; b; -z)`, and so do large positive arguments
/// when `b - a` is a nonpositive integer (the transformed series is then a
/// positive-term polynomial).
pub fn kummer_1f1(a: f64, b: f64, z: f64, ctl: &SeriesControl) -> Result<f64> {
    let s = kummer_routed(a, b, z, ctl)?;
    if s.mantissa == 0.0 {
        return Ok(0.0);
    }
    Ok(s.mantissa.signum() * s.ln_abs().exp())
}

/// Natural log of 1F1(a; b; z). Fails if the function value is not positive.
pub fn ln_kummer_1f1(a: f64, b: f64, z: f64, ctl: &SeriesControl) -> Result<f64> {
    let s = kummer_routed(a, b, z, ctl)?;
    if s.mantissa <= 0.0 {
        return Err(Error::InvalidParams(format!(
            "ln_kummer_1f1: 1F1({a}; {b}; {z}) is not positive"
        )));
    }
    Ok(s.ln_abs())
}

/// Natural log of the modified Bessel function I_nu(z), `nu >= 0`, `z >= 0`.
pub fn ln_bessel_i(nu: f64, z: f64, ctl: &SeriesControl) -> Result<f64> {
    if !(nu >= 0.0 && nu.is_finite()) || !(z >= 0.0 && z.is_finite()) {
        return Err(Error::InvalidParams(format!(
            "bessel_i needs nu >= 0 and z >= 0, got nu = {nu}, z = {z}"
        )));
    }
    if z == 0.0 {
        return Ok(if nu == 0.0 { 0.0 } else { f64::NEG_INFINITY });
    }
    let half = 0.5 * z;
    let ln_t0 = nu * half.ln() - ln_gamma(nu + 1.0);
    let q = half * half;
    let mut acc = CompensatedSum::new();
    let mut log_scale = 0.0;
    let mut term = 1.0f64;
    acc.add(term);
    for k in 0..ctl.max_terms {
        let kf = k as f64;
        term *= q / ((kf + 1.0) * (kf + 1.0 + nu));
        acc.add(term);
        let s = acc.value();
        if s > RESCALE_AT {
            let mut rescaled = CompensatedSum::new();
            rescaled.add(s / RESCALE_AT);
            acc = rescaled;
            term /= RESCALE_AT;
            log_scale += RESCALE_AT.ln();
        }
        let next_ratio = q / ((kf + 2.0) * (kf + 2.0 + nu));
        if term == 0.0 || (next_ratio < 1.0 && term * next_ratio / (1.0 - next_ratio) <= ctl.rel_tol * acc.value()) {
            return Ok(ln_t0 + acc.value().ln() + log_scale);
        }
    }
    Err(Error::NoConvergence {
        what: "bessel_i series",
        terms: ctl.max_terms,
    })
}

/// Modified Bessel function of the first kind I_nu(z).
pub fn bessel_i(nu: f64, z: f64, ctl: &SeriesControl) -> Result<f64> {
    Ok(ln_bessel_i(nu, z, ctl)?.exp())
}

/// Exponentially scaled Bessel function `e^{-z} I_nu(z)`.
pub fn bessel_i_scaled(nu: f64, z: f64, ctl: &SeriesControl) -> Result<f64> {
    Ok((ln_bessel_i(nu, z, ctl)? - z).exp())
}

fn e1_series(x: f64) -> f64 {
    // E1(x) = -gamma - ln x - sum_{k>=1} (-x)^k / (k k!)
    let mut acc = CompensatedSum::new();
    let mut pow = 1.0;
    for k in 1..200 {
        let kf = k as f64;
        pow *= -x / kf;
        let t = pow / kf;
        acc.add(t);
        if t.abs() < 1e-18 * acc.value().abs().max(1e-300) {
            break;
        }
    }
    -EULER_GAMMA - x.ln() - acc.value()
}

/// `e^x E1(x)` by Lentz's continued fraction, for `x > 1`.
fn e1_scaled_cf(x: f64) -> f64 {
    let mut b = x + 1.0;
    let mut c = 1.0 / FPMIN;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..10_000 {
        let an = -((i * i) as f64);
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            break;
        }
    }
    h
}

/// Exponential integral E1(x) = Gamma(0, x) = -Ei(-x), `x > 0`.
pub fn exp_integral_e1(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::NonPositiveInput(x));
    }
    if x <= 1.0 {
        Ok(e1_series(x))
    } else {
        Ok(e1_scaled_cf(x) * (-x).exp())
    }
}

/// `e^x E1(x)`, finite for arbitrarily large `x`.
pub fn exp_integral_e1_scaled(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::NonPositiveInput(x));
    }
    if x <= 1.0 {
        Ok(x.exp() * e1_series(x))
    } else {
        Ok(e1_scaled_cf(x))
    }
}

/// `x^k e^x Gamma(-k, x)` for a single `k` via continued fraction.
fn weighted_upper_gamma_cf(k: u32, x: f64) -> f64 {
    let a = -(k as f64);
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / FPMIN;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..100_000 {
        let fi = i as f64;
        let an = -fi * (fi - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = b + an / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            break;
        }
    }
    h
}

/// Returns `T_k(x) = x^k e^x Gamma(-k, x)` for `k = 0..=k_max`.
///
/// Uses `T_k = (1 - x T_{k-1}) / k`, the weighted form of
/// `Gamma(a+1, x) = a Gamma(a, x) + x^a e^{-x}`. The recurrence only damps
/// errors when run upward for `k > x` and downward for `k < x`, so it is
/// anchored at `k* = min(k_max, floor(x))`.
pub fn weighted_upper_gamma_negint_all(k_max: u32, x: f64) -> Result<Vec<f64>> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::NonPositiveInput(x));
    }
    let n = k_max as usize + 1;
    let mut t = vec![0.0; n];
    let anchor = if x < 1.0 {
        t[0] = exp_integral_e1_scaled(x)?;
        0usize
    } else {
        let ks = (x.floor() as u64).min(k_max as u64) as usize;
        t[ks] = if ks == 0 {
            exp_integral_e1_scaled(x)?
        } else {
            weighted_upper_gamma_cf(ks as u32, x)
        };
        for k in (1..=ks).rev() {
            t[k - 1] = (1.0 - k as f64 * t[k]) / x;
        }
        ks
    };
    for k in anchor + 1..n {
        t[k] = (1.0 - x * t[k - 1]) / k as f64;
    }
    Ok(t)
}

/// Scaled upper incomplete gamma at negative integer order,
/// `G_k(x) = e^x Gamma(-k, x)`.
pub fn scaled_upper_gamma_negint(k: u32, x: f64) -> Result<f64> {
    let t = weighted_upper_gamma_negint_all(k, x)?;
    Ok((t[k as usize].ln() - k as f64 * x.ln()).exp())
}

/// Regularized incomplete gamma functions `(P, Q)` for integer shape
/// `shape >= 1` at `y >= 0`, evaluated as Poisson tail sums so that the
/// smaller of the two is accurate to full relative precision.
pub fn gamma_pq_int(shape: u32, y: f64) -> (f64, f64) {
    debug_assert!(shape >= 1);
    if y <= 0.0 {
        return (0.0, 1.0);
    }
    if y.is_infinite() {
        return (1.0, 0.0);
    }
    let ln_y = y.ln();
    let pois = |r: u64| (-y + r as f64 * ln_y - ln_factorial(r)).exp();
    if y < shape as f64 {
        // P = Pr[Poisson(y) >= shape]
        let mut r = shape as u64;
        let mut t = pois(r);
        let mut acc = CompensatedSum::new();
        while t > 0.0 {
            acc.add(t);
            r += 1;
            t *= y / r as f64;
            if t < 1e-17 * acc.value() {
                break;
            }
        }
        let p = acc.value();
        (p, 1.0 - p)
    } else {
        // Q = Pr[Poisson(y) <= shape - 1]
        let mut r = shape as u64 - 1;
        let mut t = pois(r);
        let mut acc = CompensatedSum::new();
        loop {
            acc.add(t);
            if r == 0 || t < 1e-17 * acc.value() {
                break;
            }
            t *= r as f64 / y;
            r -= 1;
        }
        let q = acc.value();
        (1.0 - q, q)
    }
}

//! Independent reference evaluators.
//!
//! The direct hypergeometric density of the κ-μ shadowed model (any real
//! parameters), the Bessel-form κ-μ density, squared-Nakagami statistics, and
//! an adaptive Gauss–Kronrod integrator. None of these touch the mixture
//! representation, which is what makes them usable as ground truth for it.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{MixtureModel, ShadowedParams};
use crate::numerics::{ln_factorial, ln_gamma, CompensatedSum};
use crate::special::{gamma_pq_int, ln_bessel_i, ln_kummer_1f1, SeriesControl};

/// κ-μ shadowed parameters with real-valued μ and m.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RealShadowedParams {
    pub gamma_bar: f64,
    pub kappa: f64,
    pub mu: f64,
    pub m: f64,
}

impl RealShadowedParams {
    pub fn new(gamma_bar: f64, kappa: f64, mu: f64, m: f64) -> Result<Self> {
        for (name, v) in [("gamma_bar", gamma_bar), ("kappa", kappa), ("mu", mu), ("m", m)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParams(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        Ok(Self {
            gamma_bar,
            kappa,
            mu,
            m,
        })
    }

    /// Gamma envelope bounding the upper tail: the `(1 - Δ₂s)^{-m}` pole.
    pub fn envelope(&self) -> Envelope {
        let delta1 = self.gamma_bar / (self.mu * (1.0 + self.kappa));
        let delta2 = (self.mu * self.kappa + self.m) / self.m * delta1;
        Envelope {
            shape: self.m.max(self.mu),
            scale: delta2,
        }
    }
}

impl From<ShadowedParams> for RealShadowedParams {
    fn from(p: ShadowedParams) -> Self {
        Self {
            gamma_bar: p.gamma_bar(),
            kappa: p.kappa(),
            mu: p.mu() as f64,
            m: p.m() as f64,
        }
    }
}

/// Gamma-shaped tail envelope used to truncate integrals over `[a, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Envelope {
    pub shape: f64,
    pub scale: f64,
}

impl Envelope {
    /// Truncation point leaving less than ~1e-14 of the envelope's mass.
    pub fn truncation(&self) -> f64 {
        self.scale * (self.shape + 40.0 + 10.0 * (self.shape + 1.0).ln())
    }
}

impl From<&MixtureModel> for Envelope {
    fn from(model: &MixtureModel) -> Self {
        let (shape, scale) = model.tail_envelope();
        Envelope {
            shape: shape as f64,
            scale,
        }
    }
}

/// Moment-matched Gamma envelope of the κ-μ distribution.
pub fn kappa_mu_envelope(gamma_bar: f64, kappa: f64, mu: f64) -> Envelope {
    // variance / mean of the κ-μ power
    let scale = gamma_bar * (1.0 + 2.0 * kappa) / (mu * (1.0 + kappa) * (1.0 + kappa));
    Envelope {
        shape: gamma_bar / scale,
        scale,
    }
}

fn check_x(x: f64) -> Result<()> {
    if x.is_nan() {
        return Err(Error::InvalidParams("argument is NaN".into()));
    }
    if x < 0.0 {
        return Err(Error::NegativeInput(x));
    }
    Ok(())
}

/// κ-μ shadowed density straight from its confluent hypergeometric form.
pub fn pdf_direct(p: &RealShadowedParams, x: f64) -> Result<f64> {
    check_x(x)?;
    let RealShadowedParams {
        gamma_bar,
        kappa,
        mu,
        m,
    } = *p;
    let ln_const =
        mu * mu.ln() - m * (mu * kappa / m).ln_1p() + mu * (1.0 + kappa).ln() - ln_gamma(mu) - gamma_bar.ln();
    if x == 0.0 {
        return Ok(match mu.partial_cmp(&1.0) {
            Some(Ordering::Greater) => 0.0,
            Some(Ordering::Equal) => ln_const.exp(),
            _ => f64::INFINITY,
        });
    }
    let t = x / gamma_bar;
    let z = mu * mu * kappa * (1.0 + kappa) / (mu * kappa + m) * t;
    let ln_f = ln_kummer_1f1(m, mu, z, &SeriesControl::default())?;
    Ok((ln_const + (mu - 1.0) * t.ln() - mu * (1.0 + kappa) * t + ln_f).exp())
}

/// κ-μ density in its Bessel form.
pub fn pdf_kappa_mu(gamma_bar: f64, kappa: f64, mu: f64, x: f64) -> Result<f64> {
    check_x(x)?;
    if !(gamma_bar > 0.0 && kappa > 0.0 && mu > 0.0) {
        return Err(Error::InvalidParams(format!(
            "pdf_kappa_mu needs positive parameters, got ({gamma_bar}, {kappa}, {mu})"
        )));
    }
    let ln_const =
        mu.ln() + 0.5 * (mu + 1.0) * (1.0 + kappa).ln() - gamma_bar.ln() - 0.5 * (mu - 1.0) * kappa.ln() - mu * kappa;
    if x == 0.0 {
        return Ok(match mu.partial_cmp(&1.0) {
            Some(Ordering::Greater) => 0.0,
            Some(Ordering::Equal) => ln_const.exp(),
            _ => f64::INFINITY,
        });
    }
    let t = x / gamma_bar;
    let z = 2.0 * mu * (kappa * (1.0 + kappa) * t).sqrt();
    let ln_i = ln_bessel_i(mu - 1.0, z, &SeriesControl::default())?;
    Ok((ln_const + 0.5 * (mu - 1.0) * t.ln() - mu * (1.0 + kappa) * t + ln_i).exp())
}

fn check_nakagami(gamma_bar: f64, m_hat: u32) -> Result<()> {
    if !(gamma_bar > 0.0 && gamma_bar.is_finite()) || m_hat == 0 {
        return Err(Error::InvalidParams(format!(
            "squared Nakagami needs gamma_bar > 0 and m_hat >= 1, got ({gamma_bar}, {m_hat})"
        )));
    }
    Ok(())
}

/// Squared-Nakagami (Gamma) density with mean `gamma_bar` and shape `m_hat`.
pub fn nakagami_pdf(gamma_bar: f64, m_hat: u32, x: f64) -> Result<f64> {
    check_nakagami(gamma_bar, m_hat)?;
    check_x(x)?;
    let k = m_hat as f64;
    if x == 0.0 {
        return Ok(if m_hat == 1 { 1.0 / gamma_bar } else { 0.0 });
    }
    Ok((k * (k / gamma_bar).ln() + (k - 1.0) * x.ln() - ln_factorial(m_hat as u64 - 1) - x * k / gamma_bar).exp())
}

/// Squared-Nakagami CDF `1 - e^{-x/Δ} Σ_{r<m̂} (x/Δ)^r / r!`, `Δ = γ̄/m̂`.
pub fn nakagami_cdf(gamma_bar: f64, m_hat: u32, x: f64) -> Result<f64> {
    check_nakagami(gamma_bar, m_hat)?;
    check_x(x)?;
    Ok(gamma_pq_int(m_hat, x * m_hat as f64 / gamma_bar).0)
}

// ---------------------------------------------------------------------------
// Quadrature
// ---------------------------------------------------------------------------

/// Stopping rule: `error <= max(abs, rel * |integral|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadTolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadTolerance {
    fn default() -> Self {
        Self {
            abs: 1e-10,
            rel: 1e-9,
            max_subdivisions: 10_000,
        }
    }
}

impl QuadTolerance {
    /// Tolerance driven by the relative criterion only.
    pub fn relative(rel: f64) -> Self {
        Self {
            abs: 0.0,
            rel,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub subdivisions: usize,
}

const XGK: [f64; 11] = [
    0.995_657_163_025_808_1,
    0.973_906_528_517_171_7,
    0.930_157_491_355_708_2,
    0.865_063_366_688_984_5,
    0.780_817_726_586_416_9,
    0.679_409_568_299_024_4,
    0.562_757_134_668_604_7,
    0.433_395_394_129_247_2,
    0.294_392_862_701_460_2,
    0.148_874_338_981_631_2,
    0.0,
];
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874,
    0.032_558_162_307_964_73,
    0.054_755_896_574_352,
    0.075_039_674_810_919_95,
    0.093_125_454_583_697_6,
    0.109_387_158_802_297_64,
    0.123_491_976_262_065_85,
    0.134_709_217_311_473_33,
    0.142_775_938_577_060_08,
    0.147_739_104_901_338_5,
    0.149_445_554_002_916_9,
];
// Gauss weights for the odd Kronrod nodes XGK[1], XGK[3], ..., XGK[9]
const WG: [f64; 5] = [
    0.066_671_344_308_688_14,
    0.149_451_349_150_580_6,
    0.219_086_362_515_982_04,
    0.269_266_719_309_996_35,
    0.295_524_224_714_752_87,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gauss_kronrod_21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<Panel> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = WGK[10] * fc;
    let mut gauss = 0.0;
    let mut finite = fc.is_finite();
    for i in 0..10 {
        let dx = h * XGK[i];
        let s = f(c - dx) + f(c + dx);
        finite &= s.is_finite();
        kronrod += WGK[i] * s;
        if i % 2 == 1 {
            gauss += WG[i / 2] * s;
        }
    }
    if !finite {
        return Err(Error::QuadratureFailure(format!(
            "integrand is not finite on [{a}, {b}]"
        )));
    }
    Ok(Panel {
        a,
        b,
        value: kronrod * h,
        error: ((kronrod - gauss) * h).abs(),
    })
}

/// Globally adaptive Gauss–Kronrod (10/21) quadrature on `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: &QuadTolerance) -> Result<QuadResult> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::QuadratureFailure(format!(
            "finite limits required, got [{a}, {b}]"
        )));
    }
    if a == b {
        return Ok(QuadResult {
            value: 0.0,
            error: 0.0,
            subdivisions: 0,
        });
    }
    if b < a {
        let r = integrate(f, b, a, tol)?;
        return Ok(QuadResult { value: -r.value, ..r });
    }
    const INITIAL_PANELS: usize = 8;
    let mut heap = BinaryHeap::new();
    let width = (b - a) / INITIAL_PANELS as f64;
    for i in 0..INITIAL_PANELS {
        let lo = a + width * i as f64;
        let hi = if i + 1 == INITIAL_PANELS { b } else { lo + width };
        heap.push(gauss_kronrod_21(&f, lo, hi)?);
    }
    let mut subdivisions = 0;
    loop {
        let (value, error) = totals(&heap);
        if error <= tol.abs.max(tol.rel * value.abs()) {
            return Ok(QuadResult {
                value,
                error,
                subdivisions,
            });
        }
        if subdivisions >= tol.max_subdivisions {
            return Err(Error::QuadratureFailure(format!(
                "tolerance not met after {subdivisions} subdivisions (estimate {value}, error {error})"
            )));
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // panel cannot be split further in floating point
            return Ok(QuadResult {
                value,
                error,
                subdivisions,
            });
        }
        heap.push(gauss_kronrod_21(&f, worst.a, mid)?);
        heap.push(gauss_kronrod_21(&f, mid, worst.b)?);
        subdivisions += 1;
    }
}

fn totals(heap: &BinaryHeap<Panel>) -> (f64, f64) {
    let mut v = CompensatedSum::new();
    let mut e = 0.0;
    for p in heap.iter() {
        v.add(p.value);
        e += p.error;
    }
    (v.value(), e)
}

/// `∫_a^∞ f` through the map `x = a + t/(1-t)`.
pub fn integrate_semi_infinite<F: Fn(f64) -> f64>(f: F, a: f64, tol: &QuadTolerance) -> Result<QuadResult> {
    integrate(
        |t| {
            let u = 1.0 - t;
            f(a + t / u) / (u * u)
        },
        0.0,
        1.0,
        tol,
    )
}

/// Upper integration limit for [`quad_expect`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Upper {
    Finite(f64),
    /// Infinite limit, truncated where the envelope leaves negligible mass.
    Infinite(Envelope),
}

fn fallible<F: Fn(f64) -> Result<f64>>(f: F) -> impl Fn(f64) -> f64 {
    move |x| f(x).unwrap_or(f64::NAN)
}

/// `F(x) = ∫_0^x pdf`.
pub fn quad_cdf<P: Fn(f64) -> Result<f64>>(pdf: P, x: f64, tol: &QuadTolerance) -> Result<f64> {
    check_x(x)?;
    Ok(integrate(fallible(pdf), 0.0, x, tol)?.value)
}

/// `F` on an ascending grid, integrating consecutive segments and summing
/// them with compensation.
pub fn quad_cdf_grid<P: Fn(f64) -> Result<f64>>(pdf: P, xs: &[f64], tol: &QuadTolerance) -> Result<Vec<f64>> {
    let f = fallible(pdf);
    let mut acc = CompensatedSum::new();
    let mut prev = 0.0;
    let mut out = Vec::with_capacity(xs.len());
    for &x in xs {
        check_x(x)?;
        if x < prev {
            return Err(Error::InvalidParams("quad_cdf_grid needs an ascending grid".into()));
        }
        acc.add(integrate(&f, prev, x, tol)?.value);
        out.push(acc.value());
        prev = x;
    }
    Ok(out)
}

/// `∫_a^b h(x) pdf(x) dx`.
pub fn quad_expect<P, H>(pdf: P, h: H, a: f64, upper: Upper, tol: &QuadTolerance) -> Result<f64>
where
    P: Fn(f64) -> Result<f64>,
    H: Fn(f64) -> f64,
{
    check_x(a)?;
    let b = match upper {
        Upper::Finite(b) => b,
        Upper::Infinite(env) => env.truncation().max(a),
    };
    let pdf = fallible(pdf);
    Ok(integrate(|x| h(x) * pdf(x), a, b, tol)?.value)
}

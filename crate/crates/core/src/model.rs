//! Finite Gamma-mixture representation of the κ-μ shadowed distribution with
//! integer fading parameters.
//!
//! The MGF `(1 - Δ₁s)^{m-μ} / (1 - Δ₂s)^m` is rational when μ and m are
//! integers, so partial fractions turn the density into a finite sum of
//! Gamma densities with integer shapes:
//!
//! * `m >= μ` ([`Regime::Proper`]): `m - μ + 1` components sharing scale Δ₂,
//!   weighted by binomial probabilities.
//! * `m < μ` ([`Regime::Improper`]): μ components with scales Δ₁ and Δ₂ and
//!   weights of alternating sign.
//!
//! Everything downstream (PDF, CDF, MGF, moments, capacity, sampling) works on
//! the component list held by [`MixtureModel`].

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{ln_binomial, ln_factorial, sum_compensated, CompensatedSum};
use crate::special::gamma_pq_int;

/// Smallest κ accepted when `m < μ`. Below it Δ₁ and Δ₂ nearly coincide and
/// the signed weights grow without bound.
pub const KAPPA_MIN: f64 = 1e-3;

/// Upper bound on μ and m.
pub const MAX_FADING_PARAM: u32 = 2000;

/// Maximum tolerated `|Σ C_i - 1|` when building a mixture.
pub const WEIGHT_SUM_TOL: f64 = 1e-9;

/// Relative size (against the peak density estimate) below which negative
/// rounding residue is clamped to zero.
pub const CLAMP_REL: f64 = 1e-12;

/// Signed-sum condition number above which the origin series is tried.
const COND_SWITCH: f64 = 1e3;

/// Maximum number of terms in the origin series.
const ORIGIN_TERMS: usize = 256;

/// Model tuple (γ̄, κ, μ, m) with integer fading parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShadowedParams {
    gamma_bar: f64,
    kappa: f64,
    mu: u32,
    m: u32,
}

impl ShadowedParams {
    pub fn new(gamma_bar: f64, kappa: f64, mu: u32, m: u32) -> Result<Self> {
        if !(gamma_bar > 0.0 && gamma_bar.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "gamma_bar must be positive and finite, got {gamma_bar}"
            )));
        }
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "kappa must be positive and finite, got {kappa}"
            )));
        }
        for (name, v) in [("mu", mu), ("m", m)] {
            if v == 0 || v > MAX_FADING_PARAM {
                return Err(Error::InvalidParams(format!(
                    "{name} must be an integer in [1, {MAX_FADING_PARAM}], got {v}"
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

    /// Same κ, μ, m with a different mean SNR.
    pub fn with_gamma_bar(&self, gamma_bar: f64) -> Result<Self> {
        Self::new(gamma_bar, self.kappa, self.mu, self.m)
    }

    pub fn gamma_bar(&self) -> f64 {
        self.gamma_bar
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn mu(&self) -> u32 {
        self.mu
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn regime(&self) -> Regime {
        if self.m >= self.mu {
            Regime::Proper
        } else {
            Regime::Improper
        }
    }

    pub fn deltas(&self) -> DeltaPair {
        let mu = self.mu as f64;
        let m = self.m as f64;
        let delta1 = self.gamma_bar / (mu * (1.0 + self.kappa));
        DeltaPair {
            delta1,
            delta2: (mu * self.kappa + m) / m * delta1,
        }
    }

    /// `(ln p, ln q)` with `p = m/(μκ+m)` and `q = μκ/(μκ+m)`.
    fn ln_pq(&self) -> (f64, f64) {
        let mk = self.mu as f64 * self.kappa;
        let m = self.m as f64;
        let ln_total = (mk + m).ln();
        (m.ln() - ln_total, mk.ln() - ln_total)
    }
}

/// The two Gamma scales underlying the MGF factorization, Δ₁ < Δ₂.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeltaPair {
    pub delta1: f64,
    pub delta2: f64,
}

impl DeltaPair {
    /// `Δ₂ - Δ₁`, computed without subtraction.
    fn gap(&self, params: &ShadowedParams) -> f64 {
        self.delta1 * params.mu as f64 * params.kappa / params.m as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    /// `m >= μ`: convex combination with binomial weights.
    Proper,
    /// `m < μ`: linear combination with signed weights.
    Improper,
}

/// One mixture term: `weight * x^{k-1} e^{-x/Ω} / ((k-1)! Ω^k)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GammaComponent {
    pub weight: f64,
    pub shape: u32,
    pub scale: f64,
}

impl GammaComponent {
    /// Log of the (unweighted) Gamma density at `x > 0`.
    pub fn ln_density(&self, x: f64) -> f64 {
        let k = self.shape as f64;
        (k - 1.0) * x.ln() - x / self.scale - ln_factorial(self.shape as u64 - 1) - k * self.scale.ln()
    }

    /// Unweighted Gamma density, with the continuous extension at `x = 0`.
    pub fn density(&self, x: f64) -> f64 {
        if x == 0.0 {
            return if self.shape == 1 { 1.0 / self.scale } else { 0.0 };
        }
        self.ln_density(x).exp()
    }

    /// Component mean `shape * scale`.
    pub fn mean(&self) -> f64 {
        self.shape as f64 * self.scale
    }

    fn mode_density(&self) -> f64 {
        if self.shape == 1 {
            1.0 / self.scale
        } else {
            self.density((self.shape - 1) as f64 * self.scale)
        }
    }
}

/// Power series of the density around the origin for the improper regime.
///
/// The density is the convolution of Gamma(μ-m, Δ₁) and Gamma(m, Δ₂); with
/// `y = x/Δ₁` and `ρ = Δ₁/Δ₂` its Taylor expansion is
/// `f(x) = K x^{μ-1} Σ_s (-1)^s E_s y^s / s!` where `E_s` is the mean of
/// `ρ^{s-k}` under a beta-binomial law on `k`. Every coefficient is positive
/// and bounded by one, so the expansion carries no cancellation inside the
/// coefficients and near the origin it avoids the catastrophic cancellation of
/// the signed mixture sum.
#[derive(Debug, Clone)]
struct OriginSeries {
    mu: u32,
    inv_delta1: f64,
    ln_prefactor: f64,
    coeffs: Vec<f64>,
}

impl OriginSeries {
    fn new(params: &ShadowedParams, deltas: &DeltaPair) -> Self {
        let a = (params.mu - params.m) as u64;
        let b = params.m as u64;
        let mu = params.mu as u64;
        let ln_rho = deltas.delta1.ln() - deltas.delta2.ln();
        let coeffs = (0..ORIGIN_TERMS as u64)
            .map(|s| {
                let ln_norm = ln_binomial(mu - 1 + s, s);
                sum_compensated((0..=s).map(|k| {
                    (ln_binomial(a - 1 + k, k) + ln_binomial(b - 1 + s - k, s - k) - ln_norm + (s - k) as f64 * ln_rho)
                        .exp()
                }))
            })
            .collect();
        let ln_prefactor = -(a as f64) * deltas.delta1.ln() - (b as f64) * deltas.delta2.ln() - ln_factorial(mu - 1);
        Self {
            mu: params.mu,
            inv_delta1: 1.0 / deltas.delta1,
            ln_prefactor,
            coeffs,
        }
    }

    /// Returns `(value, condition)` or `None` when the series is truncated.
    fn eval(&self, x: f64, integrate: bool) -> Option<(f64, f64)> {
        let y = x * self.inv_delta1;
        let mut acc = CompensatedSum::new();
        let mut abs = 0.0;
        let mut pow = 1.0; // y^s / s!
        for (s, &c) in self.coeffs.iter().enumerate() {
            if s > 0 {
                pow *= y / s as f64;
            }
            let mut t = c * pow;
            if integrate {
                t /= (self.mu as usize + s) as f64;
            }
            if s % 2 == 1 {
                t = -t;
            }
            acc.add(t);
            abs += t.abs();
            if (s as f64) > y && t.abs() <= 1e-17 * acc.value().abs() {
                let sum = acc.value();
                let power = if integrate {
                    self.mu as f64
                } else {
                    self.mu as f64 - 1.0
                };
                let value = (self.ln_prefactor + power * x.ln()).exp() * sum;
                return Some((value, abs / sum.abs()));
            }
        }
        None
    }
}

/// Finite Gamma-mixture form of a κ-μ shadowed distribution.
#[derive(Debug, Clone)]
pub struct MixtureModel {
    params: ShadowedParams,
    components: Vec<GammaComponent>,
    regime: Regime,
    peak: f64,
    origin: Option<OriginSeries>,
}

/// Signed weights (log-magnitude, sign) computed from the partial-fraction
/// residues expressed through Δ₁, Δ₂. Table order, `C_0 = 0` omitted.
fn residue_weights(params: &ShadowedParams, deltas: &DeltaPair) -> Vec<(f64, f64, u32, f64)> {
    let mu = params.mu as u64;
    let m = params.m as u64;
    let (ln_d1, ln_d2) = (deltas.delta1.ln(), deltas.delta2.ln());
    match params.regime() {
        Regime::Proper => {
            // (1 - Δ₁s) = p (1 - Δ₂s) + q with p = Δ₁/Δ₂, binomial expansion
            let n = m - mu;
            let ln_p = ln_d1 - ln_d2;
            let ln_q = deltas.gap(params).ln() - ln_d2;
            (0..=n)
                .map(|i| {
                    let ln_c = ln_binomial(n, i) + i as f64 * ln_p + (n - i) as f64 * ln_q;
                    (1.0, ln_c, (m - i) as u32, deltas.delta2)
                })
                .collect()
        }
        Regime::Improper => {
            let a = mu - m;
            let ln_gap = deltas.gap(params).ln();
            let mut out = Vec::with_capacity(mu as usize);
            // Δ₁ block: (-1)^{j-1} C(m+j-2, j-1) Δ₂^{j-1} Δ₁^m / (Δ₁-Δ₂)^{m+j-1}
            let sign1 = if m.is_multiple_of(2) { 1.0 } else { -1.0 };
            for j in 1..=a {
                let ln_c = ln_binomial(m + j - 2, j - 1) + (j - 1) as f64 * ln_d2 + m as f64 * ln_d1
                    - (m + j - 1) as f64 * ln_gap;
                out.push((sign1, ln_c, (a - j + 1) as u32, deltas.delta1));
            }
            // Δ₂ block: (-1)^{j-1} C(μ-m+j-2, j-1) Δ₁^{j-1} Δ₂^{μ-m} / (Δ₂-Δ₁)^{μ-m+j-1}
            for j in 1..=m {
                let sign = if (j - 1) % 2 == 0 { 1.0 } else { -1.0 };
                let ln_c = ln_binomial(a + j - 2, j - 1) + (j - 1) as f64 * ln_d1 + a as f64 * ln_d2
                    - (a + j - 1) as f64 * ln_gap;
                out.push((sign, ln_c, (m - j + 1) as u32, deltas.delta2));
            }
            out
        }
    }
}

/// Mixture weights in the unified tabulated form, written with
/// `p = m/(μκ+m)` and `q = μκ/(μκ+m)`. Returns all `M + 1` entries in table
/// order, including the structural `C_0 = 0` of the `μ > m` case.
pub fn tabulated_weights(params: &ShadowedParams) -> Vec<f64> {
    let mu = params.mu as i64;
    let m = params.m as i64;
    let (ln_p, ln_q) = params.ln_pq();
    let term =
        |sign: f64, ln_binom: f64, ep: i64, eq: i64| sign * (ln_binom + ep as f64 * ln_p + eq as f64 * ln_q).exp();
    if mu > m {
        let mut c = vec![0.0];
        for i in 1..=mu {
            if i <= mu - m {
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                let lb = ln_binomial((m + i - 2) as u64, (i - 1) as u64);
                c.push(term(sign, lb, m, -m - i + 1));
            } else {
                let e = i - mu + m - 1;
                let sign = if e % 2 == 0 { 1.0 } else { -1.0 };
                let lb = ln_binomial((i - 2) as u64, e as u64);
                c.push(term(sign, lb, e, -i + 1));
            }
        }
        c
    } else {
        let n = m - mu;
        (0..=n)
            .map(|i| term(1.0, ln_binomial(n as u64, i as u64), i, n - i))
            .collect()
    }
}

/// Build the exact finite mixture for integer (μ, m).
pub fn build_mixture(params: &ShadowedParams) -> Result<MixtureModel> {
    let regime = params.regime();
    if regime == Regime::Improper && params.kappa < KAPPA_MIN {
        return Err(Error::KappaTooSmall {
            kappa: params.kappa,
            min: KAPPA_MIN,
        });
    }
    let deltas = params.deltas();
    let residues = residue_weights(params, &deltas);

    // cross-check against the tabulated (p, q) presentation
    let table = tabulated_weights(params);
    let table_nonzero: Vec<f64> = match regime {
        Regime::Proper => table,
        Regime::Improper => table[1..].to_vec(),
    };
    if table_nonzero.len() != residues.len() {
        return Err(Error::InternalConsistency(format!(
            "component count mismatch: {} vs {}",
            residues.len(),
            table_nonzero.len()
        )));
    }
    let mut components = Vec::with_capacity(residues.len());
    for (&(sign, ln_c, shape, scale), &tab) in residues.iter().zip(&table_nonzero) {
        let weight = sign * ln_c.exp();
        let tol = 1e-9 * weight.abs().max(f64::MIN_POSITIVE);
        if (weight - tab).abs() > tol {
            return Err(Error::InternalConsistency(format!(
                "weight mismatch between residue and tabulated forms: {weight} vs {tab}"
            )));
        }
        if weight != 0.0 {
            components.push(GammaComponent { weight, shape, scale });
        }
    }

    let weight_sum = sum_compensated(components.iter().map(|c| c.weight));
    if (weight_sum - 1.0).abs() > WEIGHT_SUM_TOL {
        return Err(Error::InternalConsistency(format!(
            "weights sum to {weight_sum}, expected 1"
        )));
    }
    let peak = components
        .iter()
        .map(|c| c.weight.abs() * c.mode_density())
        .fold(0.0, f64::max);
    let origin = match regime {
        Regime::Improper => Some(OriginSeries::new(params, &deltas)),
        Regime::Proper => None,
    };
    Ok(MixtureModel {
        params: *params,
        components,
        regime,
        peak,
        origin,
    })
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

impl MixtureModel {
    pub fn params(&self) -> &ShadowedParams {
        &self.params
    }

    pub fn components(&self) -> &[GammaComponent] {
        &self.components
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    /// `Σ C_i`.
    pub fn weight_sum(&self) -> f64 {
        sum_compensated(self.components.iter().map(|c| c.weight))
    }

    /// `Σ C_i m_i Ω_i`, the mixture mean.
    pub fn mean(&self) -> f64 {
        sum_compensated(self.components.iter().map(|c| c.weight * c.mean()))
    }

    /// Largest component scale together with the largest shape at that scale.
    pub fn tail_envelope(&self) -> (u32, f64) {
        let scale = self.components.iter().map(|c| c.scale).fold(0.0, f64::max);
        let shape = self
            .components
            .iter()
            .filter(|c| c.scale == scale)
            .map(|c| c.shape)
            .max()
            .unwrap_or(1);
        (shape, scale)
    }

    fn clamp_density(&self, raw: f64) -> Result<f64> {
        if raw >= 0.0 {
            Ok(raw)
        } else if -raw <= CLAMP_REL * self.peak {
            Ok(0.0)
        } else {
            Err(Error::InternalConsistency(format!(
                "density evaluated to {raw} (peak estimate {})",
                self.peak
            )))
        }
    }

    fn clamp_probability(raw: f64) -> Result<f64> {
        if (0.0..=1.0).contains(&raw) {
            Ok(raw)
        } else if (-CLAMP_REL..0.0).contains(&raw) {
            Ok(0.0)
        } else if raw > 1.0 && raw <= 1.0 + CLAMP_REL {
            Ok(1.0)
        } else {
            Err(Error::InternalConsistency(format!("probability evaluated to {raw}")))
        }
    }

    /// Sum of `f(component)` with its condition number `Σ|t_i| / |Σ t_i|`.
    fn signed_sum<F: Fn(&GammaComponent) -> f64>(&self, f: F) -> (f64, f64) {
        let mut acc = CompensatedSum::new();
        let mut abs = 0.0;
        for c in &self.components {
            let t = f(c);
            acc.add(t);
            abs += t.abs();
        }
        let v = acc.value();
        (v, if v == 0.0 { f64::INFINITY } else { abs / v.abs() })
    }

    /// Density at `x >= 0` (continuous extension at the origin).
    pub fn pdf(&self, x: f64) -> Result<f64> {
        check_x(x)?;
        if x == 0.0 {
            let raw = sum_compensated(self.components.iter().map(|c| c.weight * c.density(0.0)));
            return self.clamp_density(raw);
        }
        let (mut value, cond) = self.signed_sum(|c| c.weight * c.ln_density(x).exp());
        if cond > COND_SWITCH {
            if let Some((v, series_cond)) = self.origin.as_ref().and_then(|o| o.eval(x, false)) {
                if series_cond < cond {
                    value = v;
                }
            }
        }
        self.clamp_density(value)
    }

    /// Cumulative distribution at `x >= 0`.
    pub fn cdf(&self, x: f64) -> Result<f64> {
        check_x(x)?;
        if x == 0.0 {
            return Ok(0.0);
        }
        let pq: Vec<(f64, f64)> = self
            .components
            .iter()
            .map(|c| gamma_pq_int(c.shape, x / c.scale))
            .collect();
        let lower = {
            let mut acc = CompensatedSum::new();
            let mut abs = 0.0;
            for (c, &(p, _)) in self.components.iter().zip(&pq) {
                acc.add(c.weight * p);
                abs += (c.weight * p).abs();
            }
            let v = acc.value();
            (v, if v == 0.0 { f64::INFINITY } else { abs / v.abs() })
        };
        let raw = if lower.0 > 0.5 {
            1.0 - sum_compensated(self.components.iter().zip(&pq).map(|(c, &(_, q))| c.weight * q))
        } else {
            let (mut value, cond) = lower;
            if cond > COND_SWITCH {
                if let Some((v, series_cond)) = self.origin.as_ref().and_then(|o| o.eval(x, true)) {
                    if series_cond < cond {
                        value = v;
                    }
                }
            }
            value
        };
        Self::clamp_probability(raw)
    }

    /// Mixture-form MGF `Σ C_i (1 - Ω_i s)^{-m_i}`, valid for `s < 1/max Ω_i`.
    pub fn mgf(&self, s: f64) -> Result<f64> {
        let (_, scale) = self.tail_envelope();
        let limit = 1.0 / scale;
        if !(s < limit) {
            return Err(Error::OutOfRegion { s, limit });
        }
        Ok(sum_compensated(self.components.iter().map(|c| {
            c.weight * (-(c.shape as f64) * (-c.scale * s).ln_1p()).exp()
        })))
    }

    /// Raw moment `E[γ^n] = Σ C_i Ω_i^n (m_i)(m_i+1)⋯(m_i+n-1)`.
    pub fn moment(&self, n: u32) -> Result<f64> {
        if n == 0 {
            return Err(Error::InvalidParams("moment order must be >= 1".into()));
        }
        Ok(sum_compensated(self.components.iter().map(|c| {
            let ln_rising = ln_factorial((c.shape + n - 1) as u64) - ln_factorial(c.shape as u64 - 1);
            c.weight * (ln_rising + n as f64 * c.scale.ln()).exp()
        })))
    }
}

/// Rational-form MGF `(1 - Δ₁s)^{m-μ} / (1 - Δ₂s)^m`, valid for `s < 1/Δ₂`.
pub fn mgf_rational(params: &ShadowedParams, s: f64) -> Result<f64> {
    let d = params.deltas();
    let limit = 1.0 / d.delta2;
    if !(s < limit) {
        return Err(Error::OutOfRegion { s, limit });
    }
    let num = (params.m as f64 - params.mu as f64) * (-d.delta1 * s).ln_1p();
    let den = params.m as f64 * (-d.delta2 * s).ln_1p();
    Ok((num - den).exp())
}

/// Mixture-form MGF, see [`MixtureModel::mgf`].
pub fn mgf_mixture(model: &MixtureModel, s: f64) -> Result<f64> {
    model.mgf(s)
}

/// Split presentation of the mixture: the `m < μ` case as two blocks with
/// weights `A₁ⱼ`, `A₂ⱼ` and the `m >= μ` case with weights `Bⱼ`, each term a
/// squared-Nakagami density parameterized by its mean `ω`.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitForm {
    /// `(A₁ⱼ, shape, mean)` for `j = 1..=μ-m`.
    pub a1: Vec<(f64, u32, f64)>,
    /// `(A₂ⱼ, shape, mean)` for `j = 1..=m`.
    pub a2: Vec<(f64, u32, f64)>,
    /// `(Bⱼ, shape, mean)` for `j = 0..=m-μ`.
    pub b: Vec<(f64, u32, f64)>,
}

impl SplitForm {
    pub fn new(params: &ShadowedParams) -> Self {
        let mu = params.mu as i64;
        let m = params.m as i64;
        let d = params.deltas();
        let (ln_p, ln_q) = params.ln_pq();
        let w = |ln_b: f64, ep: i64, eq: i64| (ln_b + ep as f64 * ln_p + eq as f64 * ln_q).exp();
        let mut out = SplitForm {
            a1: Vec::new(),
            a2: Vec::new(),
            b: Vec::new(),
        };
        if m < mu {
            for j in 1..=mu - m {
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                let c = sign * w(ln_binomial((m + j - 2) as u64, (j - 1) as u64), m, -m - j + 1);
                let shape = mu - m - j + 1;
                out.a1.push((c, shape as u32, d.delta1 * shape as f64));
            }
            for j in 1..=m {
                let sign = if (j - 1) % 2 == 0 { 1.0 } else { -1.0 };
                let c = sign
                    * w(
                        ln_binomial((mu - m + j - 2) as u64, (j - 1) as u64),
                        j - 1,
                        m - mu - j + 1,
                    );
                let shape = m - j + 1;
                out.a2.push((c, shape as u32, d.delta2 * shape as f64));
            }
        } else {
            let n = m - mu;
            for j in 0..=n {
                let c = w(ln_binomial(n as u64, j as u64), j, n - j);
                let shape = m - j;
                out.b.push((c, shape as u32, d.delta2 * shape as f64));
            }
        }
        out
    }

    /// Density as the sum of squared-Nakagami terms `f_K(ω; m̂; x)`.
    pub fn pdf(&self, x: f64) -> f64 {
        let nakagami = |mean: f64, shape: u32| {
            let k = shape as f64;
            if x == 0.0 {
                return if shape == 1 { 1.0 / mean } else { 0.0 };
            }
            (k * (k / mean).ln() + (k - 1.0) * x.ln() - ln_factorial(shape as u64 - 1) - x * k / mean).exp()
        };
        sum_compensated(
            self.a1
                .iter()
                .chain(&self.a2)
                .chain(&self.b)
                .map(|&(c, shape, mean)| c * nakagami(mean, shape)),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{pdf_direct, RealShadowedParams};

    fn params(g: f64, k: f64, mu: u32, m: u32) -> ShadowedParams {
        ShadowedParams::new(g, k, mu, m).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn parameter_validation() {
        assert!(ShadowedParams::new(0.0, 1.0, 1, 1).is_err());
        assert!(ShadowedParams::new(1.0, 0.0, 1, 1).is_err());
        assert!(ShadowedParams::new(1.0, 1.0, 0, 1).is_err());
        assert!(ShadowedParams::new(1.0, 1.0, 1, 2001).is_err());
        assert!(ShadowedParams::new(1.0, f64::NAN, 1, 1).is_err());
    }

    #[test]
    fn deltas_are_ordered() {
        let d = params(2.0, 0.7, 3, 5).deltas();
        assert!(d.delta1 > 0.0 && d.delta1 < d.delta2);
    }

    #[test]
    fn kappa_floor_applies_only_to_improper_regime() {
        let err = build_mixture(&params(1.0, 5e-4, 3, 2)).unwrap_err();
        assert!(matches!(err, Error::KappaTooSmall { .. }));
        assert!(build_mixture(&params(1.0, 5e-4, 2, 3)).is_ok());
    }

    #[test]
    fn collapse_to_single_gamma_when_m_equals_mu() {
        let model = build_mixture(&params(1.0, 3.0, 2, 2)).unwrap();
        assert_eq!(model.components().len(), 1);
        let c = model.components()[0];
        assert_eq!(c.shape, 2);
        assert!((c.weight - 1.0).abs() < 1e-15);
        assert!((c.scale - 0.5).abs() < 1e-15);
    }

    #[test]
    fn two_component_example() {
        let model = build_mixture(&params(1.0, 1.0, 1, 2)).unwrap();
        let c = model.components();
        assert_eq!(c.len(), 2);
        assert!((c[0].weight - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(c[0].shape, 2);
        assert!((c[1].weight - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(c[1].shape, 1);
        for comp in c {
            assert!((comp.scale - 0.75).abs() < 1e-15);
        }
        assert!((model.mean() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn improper_example_has_mixed_signs() {
        let p = params(1.0, 5.0, 3, 2);
        let model = build_mixture(&p).unwrap();
        assert_eq!(model.regime(), Regime::Improper);
        assert_eq!(model.components().len(), 3);
        let pos = model.components().iter().filter(|c| c.weight > 0.0).count();
        assert!(pos > 0 && pos < 3);
        assert!((model.weight_sum() - 1.0).abs() < 1e-12);
        assert!(rel(model.mean(), 1.0) < 1e-10);
        let direct = pdf_direct(&RealShadowedParams::from(p), 0.8).unwrap();
        assert!(rel(model.pdf(0.8).unwrap(), direct) < 1e-8);
    }

    #[test]
    fn tabulated_form_keeps_structural_zero() {
        let t = tabulated_weights(&params(1.0, 5.0, 3, 2));
        assert_eq!(t.len(), 4);
        assert_eq!(t[0], 0.0);
    }

    #[test]
    fn pdf_examples() {
        let model = build_mixture(&params(1.0, 3.0, 2, 2)).unwrap();
        let expect = 4.0 * (-2.0f64).exp();
        assert!(rel(model.pdf(1.0).unwrap(), expect) < 1e-14);
        assert!((expect - 0.541341).abs() < 1e-6);
        assert_eq!(model.pdf(0.0).unwrap(), 0.0);
        assert_eq!(model.pdf(-1.0), Err(Error::NegativeInput(-1.0)));
        // mu = 1: finite at the origin
        let model = build_mixture(&params(1.0, 1.0, 1, 2)).unwrap();
        assert!(rel(model.pdf(0.0).unwrap(), (2.0 / 3.0) / 0.75) < 1e-15);
    }

    #[test]
    fn cdf_examples() {
        let model = build_mixture(&params(1.0, 3.0, 2, 2)).unwrap();
        assert_eq!(model.cdf(0.0).unwrap(), 0.0);
        assert!((model.cdf(50.0).unwrap() - 1.0).abs() < 1e-12);
        let expect = 1.0 - (-2.0f64).exp() * 3.0;
        assert!(rel(model.cdf(1.0).unwrap(), expect) < 1e-14);
        assert!(model.cdf(-0.1).is_err());
    }

    #[test]
    fn mgf_examples() {
        let p = params(1.0, 3.0, 2, 2);
        assert_eq!(mgf_rational(&p, 0.0).unwrap(), 1.0);
        assert!(rel(mgf_rational(&p, -1.0).unwrap(), 4.0 / 9.0) < 1e-15);
        let p = params(1.0, 1.0, 1, 2);
        let model = build_mixture(&p).unwrap();
        assert!((mgf_mixture(&model, 0.0).unwrap() - 1.0).abs() < 1e-15);
        let expect = (1.0 / 3.0) * 1.75f64.powi(-2) + (2.0 / 3.0) / 1.75;
        assert!(rel(mgf_mixture(&model, -1.0).unwrap(), expect) < 1e-14);
        assert!((expect - 0.489796).abs() < 1e-6);
        for p in [params(1.0, 5.0, 3, 2), params(2.0, 5.0, 4, 1)] {
            let model = build_mixture(&p).unwrap();
            for s in [-2.0, -0.3] {
                let a = mgf_rational(&p, s).unwrap();
                let b = mgf_mixture(&model, s).unwrap();
                assert!(rel(b, a) < 1e-12, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn mgf_region_of_convergence() {
        let p = params(1.0, 3.0, 2, 2);
        let d = p.deltas();
        assert!(matches!(
            mgf_rational(&p, 1.0 / d.delta2),
            Err(Error::OutOfRegion { .. })
        ));
        let model = build_mixture(&p).unwrap();
        assert!(model.mgf(10.0).is_err());
    }

    #[test]
    fn moment_examples() {
        let model = build_mixture(&params(1.0, 3.0, 2, 2)).unwrap();
        assert!(rel(model.moment(1).unwrap(), 1.0) < 1e-14);
        assert!(rel(model.moment(2).unwrap(), 1.5) < 1e-14);
        assert!(model.moment(0).is_err());
        // second moment = M''(0), central differences on the rational MGF
        let p = params(1.0, 5.0, 3, 2);
        let model = build_mixture(&p).unwrap();
        let h = 1e-4;
        let fd = (mgf_rational(&p, h).unwrap() - 2.0 + mgf_rational(&p, -h).unwrap()) / (h * h);
        assert!(rel(model.moment(2).unwrap(), fd) < 1e-6);
    }

    #[test]
    fn origin_series_agrees_with_mixture_where_both_are_accurate() {
        let p = params(1.0, 5.0, 3, 2);
        let model = build_mixture(&p).unwrap();
        let series = model.origin.as_ref().unwrap();
        for &x in &[0.05, 0.2, 0.6] {
            let (v, _) = series.eval(x, false).unwrap();
            let (mix, cond) = model.signed_sum(|c| c.weight * c.density(x));
            assert!(cond < 1e3);
            assert!(rel(v, mix) < 1e-11, "x={x}: {v} vs {mix}");
            let (cv, _) = series.eval(x, true).unwrap();
            let mc = model.cdf(x).unwrap();
            assert!(rel(cv, mc) < 1e-11, "x={x}: {cv} vs {mc}");
        }
    }

    #[test]
    fn split_form_matches_unified_form() {
        for p in [params(1.0, 5.0, 3, 2), params(1.0, 0.5, 6, 1), params(2.0, 2.0, 2, 5)] {
            let split = SplitForm::new(&p);
            let model = build_mixture(&p).unwrap();
            for &x in &[0.3, 1.0, 2.5] {
                let a = split.pdf(x);
                let b = sum_compensated(model.components().iter().map(|c| c.weight * c.density(x)));
                assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0), "{p:?} x={x}");
            }
        }
    }
}

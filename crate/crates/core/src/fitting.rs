//! Fitting to measured power samples by the log-domain KS error factor
//! `ε = max_x |log₁₀ F̂(x) - log₁₀ F(x)|`.
//!
//! γ̄ is pinned to the sample mean. For every integer pair (μ, m) the shape
//! parameter κ is searched on `log₁₀ κ ∈ [-3, 3]`: a coarse pre-scan seeds a
//! golden-section bracket, and a final three-point step polishes the optimum.
//! Rician and Nakagami baselines are scored with the same objective.

use std::io::Read;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{build_mixture, ShadowedParams, KAPPA_MIN};
use crate::oracle::{nakagami_cdf, pdf_kappa_mu, quad_cdf_grid, QuadTolerance};

/// Smallest sample accepted for fitting.
pub const MIN_SAMPLES: usize = 50;
/// Upper bound on the number of ε evaluation points.
pub const MAX_GRID_POINTS: usize = 2000;
/// Upper end of the κ search range.
pub const KAPPA_CAP: f64 = 1e3;
/// Points in the coarse κ pre-scan.
pub const PRESCAN_POINTS: usize = 25;
/// Largest Nakagami m̂ tried for the baseline.
pub const NAKAGAMI_M_MAX: u32 = 50;
/// Largest μ or m accepted by [`fit`].
pub const FIT_PARAM_MAX: u32 = 50;

const GOLDEN_TOL: f64 = 1e-4;

/// Sorted, validated power samples.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalSample {
    values: Vec<f64>,
}

impl EmpiricalSample {
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if let Some(&bad) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::InvalidParams(format!(
                "samples must be finite and nonnegative, got {bad}"
            )));
        }
        if values.len() < MIN_SAMPLES {
            return Err(Error::TooFewSamples {
                n: values.len(),
                min: MIN_SAMPLES,
            });
        }
        values.sort_by(f64::total_cmp);
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn mean(&self) -> f64 {
        crate::numerics::sum_compensated(self.values.iter().copied()) / self.len() as f64
    }

    /// Every value multiplied by `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidParams(format!("scale must be positive, got {c}")));
        }
        Ok(Self {
            values: self.values.iter().map(|v| v * c).collect(),
        })
    }
}

/// Input layout for [`load_samples`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleFormat {
    /// Single CSV column, header row optional.
    Csv,
    /// One number per line; blank lines are skipped.
    Plain,
}

fn parse_value(field: &str, line: u64) -> Result<f64> {
    let v: f64 = field.trim().parse().map_err(|_| Error::ParseError {
        line,
        message: format!("not a number: {:?}", field.trim()),
    })?;
    if !v.is_finite() || v < 0.0 {
        return Err(Error::ParseError {
            line,
            message: format!("sample must be finite and nonnegative, got {v}"),
        });
    }
    Ok(v)
}

/// Read samples from `reader`.
pub fn load_samples<R: Read>(reader: R, format: SampleFormat) -> Result<EmpiricalSample> {
    let values = match format {
        SampleFormat::Plain => {
            let mut text = String::new();
            let mut reader = reader;
            reader.read_to_string(&mut text)?;
            text.lines()
                .enumerate()
                .filter(|(_, l)| !l.trim().is_empty())
                .map(|(i, l)| parse_value(l, i as u64 + 1))
                .collect::<Result<Vec<_>>>()?
        }
        SampleFormat::Csv => {
            let mut rdr = csv::ReaderBuilder::new()
                .has_headers(false)
                .trim(csv::Trim::All)
                .from_reader(reader);
            let mut out = Vec::new();
            for (i, rec) in rdr.records().enumerate() {
                let rec = rec.map_err(|e| Error::ParseError {
                    line: e.position().map_or(0, |p| p.line()),
                    message: e.to_string(),
                })?;
                let line = rec.position().map_or(i as u64 + 1, |p| p.line());
                if rec.len() != 1 {
                    return Err(Error::ParseError {
                        line,
                        message: format!("expected one column, found {}", rec.len()),
                    });
                }
                let field = &rec[0];
                if i == 0 && field.parse::<f64>().is_err() {
                    continue;
                }
                out.push(parse_value(field, line)?);
            }
            out
        }
    };
    EmpiricalSample::new(values)
}

/// Points at which ε is evaluated: thinned order statistics with the
/// right-continuous ECDF value at each.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalGrid {
    pub x: Vec<f64>,
    pub ecdf: Vec<f64>,
    pub floor_p: f64,
    pub n_samples: usize,
}

impl EvalGrid {
    pub fn new(sample: &EmpiricalSample) -> Result<Self> {
        let v = sample.values();
        let n = v.len();
        if v[0] == v[n - 1] {
            return Err(Error::DegenerateSample);
        }
        let g = n.min(MAX_GRID_POINTS);
        let mut x: Vec<f64> = Vec::with_capacity(g);
        let mut ecdf = Vec::with_capacity(g);
        for j in 1..=g {
            let idx = (j * n).div_ceil(g);
            let xi = v[idx - 1];
            if x.last() == Some(&xi) {
                continue;
            }
            // count of values <= xi, so ties take their full jump
            let count = v.partition_point(|&s| s <= xi);
            x.push(xi);
            ecdf.push(count as f64 / n as f64);
        }
        Ok(Self {
            x,
            ecdf,
            floor_p: 0.5 / n as f64,
            n_samples: n,
        })
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// ε against model CDF values aligned with `self.x`. Returns +∞ when no
    /// point clears the probability floor.
    pub fn epsilon_from_values(&self, model: &[f64]) -> f64 {
        let mut eps = f64::NEG_INFINITY;
        for (&e, &f) in self.ecdf.iter().zip(model) {
            if e < self.floor_p || f < self.floor_p || f.is_nan() {
                continue;
            }
            eps = eps.max((e.log10() - f.log10()).abs());
        }
        if eps == f64::NEG_INFINITY {
            f64::INFINITY
        } else {
            eps
        }
    }

    /// ε against a pointwise CDF.
    pub fn epsilon<F: Fn(f64) -> Result<f64>>(&self, cdf: F) -> Result<f64> {
        let vals = self.x.iter().map(|&x| cdf(x)).collect::<Result<Vec<_>>>()?;
        Ok(self.epsilon_from_values(&vals))
    }
}

/// ε of `cdf` against the sample's ECDF.
pub fn epsilon<F: Fn(f64) -> Result<f64>>(sample: &EmpiricalSample, cdf: F) -> Result<f64> {
    EvalGrid::new(sample)?.epsilon(cdf)
}

/// Candidate model families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    /// κ-μ shadowed with integer μ and m.
    ShadowedInt,
    /// Rician (κ-μ with μ = 1), κ plays the role of K.
    Rician,
    /// Nakagami-m̂ with integer m̂.
    Nakagami,
}

/// One scored candidate. Fields not used by a family are omitted.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Candidate {
    pub model: ModelKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<u32>,
    pub epsilon: f64,
}

/// Description of the ε evaluation grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridInfo {
    pub n_samples: usize,
    pub points: usize,
    pub floor_p: f64,
    pub x_min: f64,
    pub x_max: f64,
}

/// Best candidate overall plus everything that was scored.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitResult {
    pub model: ModelKind,
    pub gamma_bar: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<u32>,
    pub epsilon: f64,
    pub candidates: Vec<Candidate>,
    pub grid: GridInfo,
}

impl FitResult {
    /// Lowest-ε candidate of one family.
    pub fn best_of(&self, kind: ModelKind) -> Option<&Candidate> {
        self.candidates
            .iter()
            .filter(|c| c.model == kind)
            .min_by(|a, b| rank(a).partial_cmp(&rank(b)).unwrap_or(std::cmp::Ordering::Equal))
    }

    /// The winning κ-μ shadowed parameters, if that family won.
    pub fn shadowed_params(&self) -> Option<ShadowedParams> {
        match (self.model, self.kappa, self.mu, self.m) {
            (ModelKind::ShadowedInt, Some(k), Some(mu), Some(m)) => ShadowedParams::new(self.gamma_bar, k, mu, m).ok(),
            _ => None,
        }
    }
}

fn rank(c: &Candidate) -> (f64, u32, u32, f64) {
    (c.epsilon, c.mu.unwrap_or(0), c.m.unwrap_or(0), c.kappa.unwrap_or(0.0))
}

/// Minimize `obj(t)` over `t ∈ [lo, hi]`. Returns `(t, value)`.
fn minimize_scalar<F: Fn(f64) -> f64>(obj: F, lo: f64, hi: f64) -> (f64, f64) {
    let step = (hi - lo) / (PRESCAN_POINTS - 1) as f64;
    let scan: Vec<(f64, f64)> = (0..PRESCAN_POINTS)
        .map(|j| {
            let t = if j + 1 == PRESCAN_POINTS {
                hi
            } else {
                lo + step * j as f64
            };
            (t, obj(t))
        })
        .collect();
    // first minimum, so ties favour smaller κ
    let j = scan
        .iter()
        .enumerate()
        .fold(0, |best, (i, s)| if s.1 < scan[best].1 { i } else { best });
    let mut best = scan[j];
    if !best.1.is_finite() {
        return best;
    }

    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (scan[j.saturating_sub(1)].0, scan[(j + 1).min(PRESCAN_POINTS - 1)].0);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (obj(c), obj(d));
    while b - a > GOLDEN_TOL {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = obj(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = obj(d);
        }
    }
    for cand in [(c, fc), (d, fd)] {
        if cand.1 < best.1 {
            best = cand;
        }
    }

    // three-point polish: parabola through (t-h, t, t+h)
    let h = GOLDEN_TOL;
    let t0 = best.0;
    let (tl, tr) = ((t0 - h).max(lo), (t0 + h).min(hi));
    let (fl, fr) = (obj(tl), obj(tr));
    for cand in [(tl, fl), (tr, fr)] {
        if cand.1 < best.1 {
            best = cand;
        }
    }
    let denom = fl - 2.0 * best.1 + fr;
    if denom > 0.0 && tl < t0 && t0 < tr {
        let tv = (t0 + 0.5 * h * (fl - fr) / denom).clamp(lo, hi);
        let fv = obj(tv);
        if fv < best.1 {
            best = (tv, fv);
        }
    }
    best
}

fn kappa_bounds() -> (f64, f64) {
    (KAPPA_MIN.log10(), KAPPA_CAP.log10())
}

fn shadowed_candidate(grid: &EvalGrid, gamma_bar: f64, mu: u32, m: u32) -> Candidate {
    let obj = |t: f64| {
        let kappa = 10f64.powf(t);
        ShadowedParams::new(gamma_bar, kappa, mu, m)
            .and_then(|p| build_mixture(&p))
            .and_then(|model| grid.epsilon(|x| model.cdf(x)))
            .unwrap_or(f64::INFINITY)
    };
    let (lo, hi) = kappa_bounds();
    let (t, eps) = minimize_scalar(obj, lo, hi);
    Candidate {
        model: ModelKind::ShadowedInt,
        kappa: Some(10f64.powf(t)),
        mu: Some(mu),
        m: Some(m),
        epsilon: eps,
    }
}

fn rician_candidate(grid: &EvalGrid, gamma_bar: f64) -> Candidate {
    let tol = QuadTolerance::relative(1e-10);
    let obj = |t: f64| {
        let k = 10f64.powf(t);
        quad_cdf_grid(|x| pdf_kappa_mu(gamma_bar, k, 1.0, x), &grid.x, &tol)
            .map(|f| grid.epsilon_from_values(&f))
            .unwrap_or(f64::INFINITY)
    };
    let (lo, hi) = kappa_bounds();
    let (t, eps) = minimize_scalar(obj, lo, hi);
    Candidate {
        model: ModelKind::Rician,
        kappa: Some(10f64.powf(t)),
        mu: Some(1),
        m: None,
        epsilon: eps,
    }
}

fn nakagami_candidate(grid: &EvalGrid, gamma_bar: f64, m_hat: u32) -> Candidate {
    let eps = grid
        .epsilon(|x| nakagami_cdf(gamma_bar, m_hat, x))
        .unwrap_or(f64::INFINITY);
    Candidate {
        model: ModelKind::Nakagami,
        kappa: None,
        mu: None,
        m: Some(m_hat),
        epsilon: eps,
    }
}

/// Fit the selected families to `sample`. The result only depends on the
/// sample and the arguments, not on thread scheduling.
pub fn fit(sample: &EmpiricalSample, mu_max: u32, m_max: u32, models: &[ModelKind]) -> Result<FitResult> {
    for (name, v) in [("mu_max", mu_max), ("m_max", m_max)] {
        if v == 0 || v > FIT_PARAM_MAX {
            return Err(Error::InvalidParams(format!(
                "{name} must be in [1, {FIT_PARAM_MAX}], got {v}"
            )));
        }
    }
    if models.is_empty() {
        return Err(Error::InvalidParams("no model family selected".into()));
    }
    let grid = EvalGrid::new(sample)?;
    let gamma_bar = sample.mean();
    let mut kinds = models.to_vec();
    kinds.sort();
    kinds.dedup();

    let mut candidates = Vec::new();
    for kind in kinds {
        match kind {
            ModelKind::ShadowedInt => {
                let pairs: Vec<(u32, u32)> = (1..=mu_max).flat_map(|mu| (1..=m_max).map(move |m| (mu, m))).collect();
                candidates.extend(
                    pairs
                        .par_iter()
                        .map(|&(mu, m)| shadowed_candidate(&grid, gamma_bar, mu, m))
                        .collect::<Vec<_>>(),
                );
            }
            ModelKind::Rician => candidates.push(rician_candidate(&grid, gamma_bar)),
            ModelKind::Nakagami => candidates.extend(
                (1..=NAKAGAMI_M_MAX)
                    .into_par_iter()
                    .map(|m| nakagami_candidate(&grid, gamma_bar, m))
                    .collect::<Vec<_>>(),
            ),
        }
    }

    let best = candidates
        .iter()
        .filter(|c| c.epsilon.is_finite())
        .fold(None::<&Candidate>, |acc, c| match acc {
            Some(b) if rank(b) <= rank(c) => Some(b),
            _ => Some(c),
        })
        .ok_or(Error::NoFeasibleCandidate)?
        .clone();

    Ok(FitResult {
        model: best.model,
        gamma_bar,
        kappa: best.kappa,
        mu: best.mu,
        m: best.m,
        epsilon: best.epsilon,
        grid: GridInfo {
            n_samples: grid.n_samples,
            points: grid.len(),
            floor_p: grid.floor_p,
            x_min: grid.x[0],
            x_max: grid.x[grid.len() - 1],
        },
        candidates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{sample, RngState};

    fn synthetic(g: f64, k: f64, mu: u32, m: u32, n: usize, seed: u64) -> EmpiricalSample {
        let p = ShadowedParams::new(g, k, mu, m).unwrap();
        EmpiricalSample::new(sample(&p, n, &mut RngState::new(seed)).unwrap()).unwrap()
    }

    #[test]
    fn plain_loading() {
        let body = "1.0\n0.5\n2.0\n".repeat(20);
        let s = load_samples(body.as_bytes(), SampleFormat::Plain).unwrap();
        assert_eq!(s.len(), 60);
        assert_eq!(s.values()[0], 0.5);
        assert_eq!(s.values()[59], 2.0);
        let err = load_samples("-1.0\n".as_bytes(), SampleFormat::Plain).unwrap_err();
        assert!(matches!(err, Error::ParseError { line: 1, .. }));
        let err = load_samples("1\nnan\n".as_bytes(), SampleFormat::Plain).unwrap_err();
        assert!(matches!(err, Error::ParseError { line: 2, .. }));
        let err = load_samples("1\n".repeat(49).as_bytes(), SampleFormat::Plain).unwrap_err();
        assert_eq!(err, Error::TooFewSamples { n: 49, min: 50 });
    }

    #[test]
    fn csv_loading() {
        let body = format!("snr\n{}", "1.5\n0.25\n".repeat(30));
        let s = load_samples(body.as_bytes(), SampleFormat::Csv).unwrap();
        assert_eq!(s.len(), 60);
        assert_eq!(s.values()[0], 0.25);
        let s2 = load_samples("1.5\n0.25\n".repeat(30).as_bytes(), SampleFormat::Csv).unwrap();
        assert_eq!(s, s2);
        let err = load_samples("x\n1\n2,3\n".as_bytes(), SampleFormat::Csv).unwrap_err();
        assert!(matches!(err, Error::ParseError { .. }));
        let err = load_samples("x\n1\n-2\n".as_bytes(), SampleFormat::Csv).unwrap_err();
        assert!(matches!(err, Error::ParseError { line: 3, .. }));
    }

    #[test]
    fn grid_shape() {
        let s = EmpiricalSample::new((1..=5000).map(|i| i as f64).collect()).unwrap();
        let g = EvalGrid::new(&s).unwrap();
        assert_eq!(g.len(), MAX_GRID_POINTS);
        assert_eq!(*g.ecdf.last().unwrap(), 1.0);
        assert_eq!(g.floor_p, 1e-4);
        let s = EmpiricalSample::new(vec![1.0; 60]).unwrap();
        assert_eq!(EvalGrid::new(&s).unwrap_err(), Error::DegenerateSample);
    }

    #[test]
    fn epsilon_against_staircase() {
        let s = EmpiricalSample::new((0..200).map(|i| (i / 2) as f64).collect()).unwrap();
        let v = s.values().to_vec();
        let n = v.len() as f64;
        let ecdf = |x: f64| Ok(v.partition_point(|&s| s <= x) as f64 / n);
        assert_eq!(epsilon(&s, ecdf).unwrap(), 0.0);
        let e = epsilon(&s, |x| Ok(ecdf(x)? / 10.0)).unwrap();
        assert!((e - 1.0).abs() < 1e-12);
    }

    #[test]
    fn epsilon_of_true_model_is_small() {
        let s = synthetic(1.0, 1.0, 1, 6, 100_000, 1);
        let model = build_mixture(&ShadowedParams::new(1.0, 1.0, 1, 6).unwrap()).unwrap();
        let e = epsilon(&s, |x| model.cdf(x)).unwrap();
        assert!(e < 0.05, "{e}");
    }

    #[test]
    fn epsilon_is_scale_consistent() {
        let s = synthetic(1.0, 2.0, 2, 3, 2000, 3);
        let g = s.mean();
        let p = ShadowedParams::new(g, 2.0, 2, 3).unwrap();
        let e1 = epsilon(&s, |x| build_mixture(&p)?.cdf(x)).unwrap();
        let c = 7.5;
        let sc = s.scaled(c).unwrap();
        let pc = p.with_gamma_bar(g * c).unwrap();
        let e2 = epsilon(&sc, |x| build_mixture(&pc)?.cdf(x)).unwrap();
        assert!((e1 - e2).abs() < 1e-12, "{e1} {e2}");
    }

    #[test]
    fn recovers_improper_truth() {
        let s = synthetic(1.0, 5.0, 3, 2, 100_000, 1);
        let r = fit(&s, 4, 4, &[ModelKind::ShadowedInt]).unwrap();
        assert_eq!((r.mu, r.m), (Some(3), Some(2)), "{r:?}");
        assert!((r.kappa.unwrap() / 5.0 - 1.0).abs() < 0.1, "{r:?}");
        assert_eq!(r.candidates.len(), 16);
    }

    #[test]
    fn shadowed_beats_rician_on_shadowed_data() {
        let s = synthetic(1.0, 0.6, 1, 6, 100_000, 99);
        let r = fit(
            &s,
            2,
            8,
            &[ModelKind::ShadowedInt, ModelKind::Rician, ModelKind::Nakagami],
        )
        .unwrap();
        let shadowed = r.best_of(ModelKind::ShadowedInt).unwrap().epsilon;
        let rician = r.best_of(ModelKind::Rician).unwrap().epsilon;
        assert!(shadowed < rician, "{shadowed} vs {rician}");
        assert!(r.best_of(ModelKind::Nakagami).is_some());
    }

    #[test]
    fn fit_is_deterministic_and_validates_bounds() {
        let s = synthetic(2.0, 3.0, 2, 2, 3000, 5);
        let a = fit(&s, 3, 3, &[ModelKind::ShadowedInt, ModelKind::Nakagami]).unwrap();
        let b = fit(&s, 3, 3, &[ModelKind::Nakagami, ModelKind::ShadowedInt]).unwrap();
        assert_eq!(a, b);
        assert!(fit(&s, 0, 3, &[ModelKind::ShadowedInt]).is_err());
        assert!(fit(&s, 3, 51, &[ModelKind::ShadowedInt]).is_err());
    }
}

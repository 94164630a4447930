//! Exact variate generation for integer (μ, m).
//!
//! Two decompositions are available:
//!
//! * mixture selection (`m >= μ`): pick component `j` with its binomial
//!   probability, then draw Gamma(m - j, Δ₂);
//! * two-Gamma sum (`m <= μ`): Gamma(μ - m, Δ₁) + Gamma(m, Δ₂), read off the
//!   factorized MGF.
//!
//! Gamma variates with integer shape are Erlang sums `-scale Σ ln U`, so the
//! only primitive needed is a uniform on (0, 1]. Streams come from ChaCha20,
//! which is reproducible across platforms and offers independent streams for
//! parallel shards.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{build_mixture, Regime, ShadowedParams};

/// Identifier of the generator family behind [`RngState`].
pub const RNG_ALGORITHM: &str = "chacha20";

/// Seeded, reproducible random stream. Not shareable across threads; derive
/// one stream per shard with [`RngState::shard`].
#[derive(Debug, Clone)]
pub struct RngState {
    seed: u64,
    stream: u64,
    rng: ChaCha20Rng,
}

impl RngState {
    pub fn new(seed: u64) -> Self {
        Self::with_stream(seed, 0)
    }

    fn with_stream(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { seed, stream, rng }
    }

    /// Independent sub-stream for shard `index`.
    pub fn shard(&self, index: u64) -> Self {
        Self::with_stream(self.seed, index + 1)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    pub fn algorithm(&self) -> &'static str {
        RNG_ALGORITHM
    }

    /// Uniform on (0, 1] with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        ((self.rng.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Erlang variate: Gamma with integer `shape` and `scale`.
    pub fn erlang(&mut self, shape: u32, scale: f64) -> f64 {
        let mut s = 0.0;
        for _ in 0..shape {
            s += self.uniform().ln();
        }
        -scale * s
    }
}

/// Which structural decomposition drives [`sample_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SamplingMethod {
    /// Mixture selection when `m >= μ`, two-Gamma sum otherwise.
    Auto,
    /// Component selection; requires `m >= μ`.
    Mixture,
    /// Sum of two independent Gammas; requires `m <= μ`.
    TwoGamma,
}

enum Plan {
    Mixture {
        cumulative: Vec<f64>,
        shapes: Vec<u32>,
        scale: f64,
    },
    TwoGamma {
        shape1: u32,
        scale1: f64,
        shape2: u32,
        scale2: f64,
    },
}

impl Plan {
    fn new(params: &ShadowedParams, method: SamplingMethod) -> Result<Self> {
        let method = match method {
            SamplingMethod::Auto if params.regime() == Regime::Proper => SamplingMethod::Mixture,
            SamplingMethod::Auto => SamplingMethod::TwoGamma,
            other => other,
        };
        match method {
            SamplingMethod::Mixture => {
                if params.regime() != Regime::Proper {
                    return Err(Error::RegimeMismatch {
                        mu: params.mu(),
                        m: params.m(),
                    });
                }
                let model = build_mixture(params)?;
                let mut acc = 0.0;
                let cumulative = model
                    .components()
                    .iter()
                    .map(|c| {
                        acc += c.weight;
                        acc
                    })
                    .collect();
                Ok(Plan::Mixture {
                    cumulative,
                    shapes: model.components().iter().map(|c| c.shape).collect(),
                    scale: params.deltas().delta2,
                })
            }
            SamplingMethod::TwoGamma => {
                if params.m() > params.mu() {
                    return Err(Error::InvalidParams(format!(
                        "two-Gamma decomposition needs m <= mu, got mu = {}, m = {}",
                        params.mu(),
                        params.m()
                    )));
                }
                let d = params.deltas();
                Ok(Plan::TwoGamma {
                    shape1: params.mu() - params.m(),
                    scale1: d.delta1,
                    shape2: params.m(),
                    scale2: d.delta2,
                })
            }
            SamplingMethod::Auto => unreachable!(),
        }
    }

    fn pick(cumulative: &[f64], u: f64) -> usize {
        // the last bucket absorbs rounding in the cumulative weights
        let total = *cumulative.last().expect("non-empty mixture");
        cumulative
            .iter()
            .position(|&c| u * total <= c)
            .unwrap_or(cumulative.len() - 1)
    }

    fn draw(&self, rng: &mut RngState) -> f64 {
        match self {
            Plan::Mixture {
                cumulative,
                shapes,
                scale,
            } => {
                let j = Self::pick(cumulative, rng.uniform());
                rng.erlang(shapes[j], *scale)
            }
            Plan::TwoGamma {
                shape1,
                scale1,
                shape2,
                scale2,
            } => rng.erlang(*shape1, *scale1) + rng.erlang(*shape2, *scale2),
        }
    }
}

/// Draw `n` SNR values with the default decomposition.
pub fn sample(params: &ShadowedParams, n: usize, rng: &mut RngState) -> Result<Vec<f64>> {
    sample_with(params, n, rng, SamplingMethod::Auto)
}

/// Draw `n` SNR values with an explicit decomposition.
pub fn sample_with(params: &ShadowedParams, n: usize, rng: &mut RngState, method: SamplingMethod) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::InvalidParams("sample size must be >= 1".into()));
    }
    let plan = Plan::new(params, method)?;
    Ok((0..n).map(|_| plan.draw(rng)).collect())
}

/// Draw `n` values split over `shards` independent streams derived from
/// `seed`, generated in parallel. The output depends only on
/// `(seed, n, shards)`.
pub fn sample_sharded(params: &ShadowedParams, n: usize, seed: u64, shards: usize) -> Result<Vec<f64>> {
    if n == 0 || shards == 0 {
        return Err(Error::InvalidParams("sample size and shard count must be >= 1".into()));
    }
    let plan = Plan::new(params, SamplingMethod::Auto)?;
    let root = RngState::new(seed);
    let per = n.div_ceil(shards);
    let chunks: Vec<Vec<f64>> = (0..shards)
        .into_par_iter()
        .map(|i| {
            let start = i * per;
            let len = per.min(n.saturating_sub(start));
            let mut rng = root.shard(i as u64);
            (0..len).map(|_| plan.draw(&mut rng)).collect()
        })
        .collect();
    Ok(chunks.concat())
}

/// Histogram of selected component indices for the `m >= μ` mixture.
pub fn sample_component_counts(params: &ShadowedParams, n: usize, rng: &mut RngState) -> Result<Vec<u64>> {
    if params.regime() != Regime::Proper {
        return Err(Error::RegimeMismatch {
            mu: params.mu(),
            m: params.m(),
        });
    }
    match Plan::new(params, SamplingMethod::Mixture)? {
        Plan::Mixture { cumulative, .. } => {
            let mut counts = vec![0u64; cumulative.len()];
            for _ in 0..n {
                counts[Plan::pick(&cumulative, rng.uniform())] += 1;
            }
            Ok(counts)
        }
        Plan::TwoGamma { .. } => unreachable!(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(g: f64, k: f64, mu: u32, m: u32) -> ShadowedParams {
        ShadowedParams::new(g, k, mu, m).unwrap()
    }

    #[test]
    fn uniform_is_in_half_open_unit_interval() {
        let mut rng = RngState::new(3);
        for _ in 0..10_000 {
            let u = rng.uniform();
            assert!(u > 0.0 && u <= 1.0);
        }
    }

    #[test]
    fn same_seed_same_stream() {
        let p = params(1.0, 1.0, 1, 2);
        let a = sample(&p, 1000, &mut RngState::new(42)).unwrap();
        let b = sample(&p, 1000, &mut RngState::new(42)).unwrap();
        assert_eq!(a, b);
        let c = sample(&p, 1000, &mut RngState::new(43)).unwrap();
        assert!(a.iter().zip(&c).all(|(x, y)| x != y));
    }

    #[test]
    fn shards_are_reproducible_and_distinct() {
        let p = params(1.0, 5.0, 3, 2);
        let a = sample_sharded(&p, 10_001, 9, 4).unwrap();
        let b = sample_sharded(&p, 10_001, 9, 4).unwrap();
        assert_eq!(a.len(), 10_001);
        assert_eq!(a, b);
        let root = RngState::new(9);
        let mut s0 = root.shard(0);
        let mut s1 = root.shard(1);
        assert_ne!(s0.uniform(), s1.uniform());
    }

    #[test]
    fn mean_matches_gamma_bar() {
        let p = params(1.0, 3.0, 2, 2);
        let xs = sample(&p, 100_000, &mut RngState::new(1)).unwrap();
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        assert!((mean - 1.0).abs() < 3.0 * (var / n).sqrt());
        assert!(xs.iter().all(|&x| x >= 0.0));
    }

    #[test]
    fn regime_rules() {
        let mut rng = RngState::new(0);
        assert!(matches!(
            sample_component_counts(&params(1.0, 5.0, 3, 2), 10, &mut rng),
            Err(Error::RegimeMismatch { mu: 3, m: 2 })
        ));
        assert!(sample_with(&params(1.0, 5.0, 3, 2), 10, &mut rng, SamplingMethod::Mixture).is_err());
        assert!(sample_with(&params(1.0, 5.0, 2, 3), 10, &mut rng, SamplingMethod::TwoGamma).is_err());
        assert!(sample_with(&params(1.0, 5.0, 2, 2), 10, &mut rng, SamplingMethod::TwoGamma).is_ok());
        assert!(sample(&params(1.0, 5.0, 2, 2), 0, &mut rng).is_err());
    }

    #[test]
    fn single_component_always_index_zero() {
        let counts = sample_component_counts(&params(1.0, 2.0, 3, 3), 1000, &mut RngState::new(5)).unwrap();
        assert_eq!(counts, vec![1000]);
    }

    #[test]
    fn component_frequencies_follow_binomial() {
        let n = 100_000u64;
        let counts = sample_component_counts(&params(1.0, 1.0, 1, 2), n as usize, &mut RngState::new(11)).unwrap();
        let f0 = counts[0] as f64 / n as f64;
        assert!((f0 - 1.0 / 3.0).abs() < 0.006);

        // binom(3, 5/9) over the four components of (κ=2, μ=2, m=5)
        let counts = sample_component_counts(&params(1.0, 2.0, 2, 5), n as usize, &mut RngState::new(12)).unwrap();
        let p: f64 = 5.0 / 9.0;
        let q = 1.0 - p;
        let probs = [q.powi(3), 3.0 * p * q * q, 3.0 * p * p * q, p.powi(3)];
        for (c, b) in counts.iter().zip(probs) {
            let sigma = (b * (1.0 - b) / n as f64).sqrt();
            assert!((*c as f64 / n as f64 - b).abs() < 4.0 * sigma, "{counts:?}");
        }
    }
}

//! Performance metrics built on the mixture form.
//!
//! Any metric already solved for Nakagami-m̂ fading lifts to the κ-μ shadowed
//! model as a finite weighted sum over components ([`average_metric`]).
//! Ergodic capacity is the worked instance. The module also holds the
//! Rician/Nakagami approximation maps and the m → ∞ convergence diagnostics.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{build_mixture, MixtureModel, ShadowedParams};
use crate::numerics::{logspace, CompensatedSum};
use crate::oracle::{kappa_mu_envelope, pdf_kappa_mu, quad_cdf_grid, quad_expect, Envelope, QuadTolerance, Upper};
use crate::special::weighted_upper_gamma_negint_all;

/// Number of points in the diagnostic grids.
pub const DIAGNOSTIC_GRID_POINTS: usize = 2001;

/// Log-spaced diagnostic grid on `[1e-6 γ̄, 50 γ̄]`.
pub fn diagnostic_grid(gamma_bar: f64) -> Vec<f64> {
    logspace(1e-6 * gamma_bar, 50.0 * gamma_bar, DIAGNOSTIC_GRID_POINTS)
}

/// `Σ_i C_i h(m_i Ω_i, m_i)`: a Nakagami-m̂ metric `h(γ̄, m̂)` averaged over the
/// mixture. Each component enters with its own mean `m_i Ω_i` and shape `m_i`.
/// Terms are accumulated in decreasing `|C_i|` with compensation.
pub fn average_metric<H>(model: &MixtureModel, h: H) -> Result<f64>
where
    H: Fn(f64, u32) -> Result<f64>,
{
    let mut comps: Vec<_> = model.components().to_vec();
    comps.sort_by(|a, b| b.weight.abs().total_cmp(&a.weight.abs()));
    let mut acc = CompensatedSum::new();
    for c in comps {
        let v = h(c.mean(), c.shape).map_err(|e| Error::MetricEvaluationFailure(e.to_string()))?;
        if !v.is_finite() {
            return Err(Error::MetricEvaluationFailure(format!(
                "metric is {v} at mean {} with shape {}",
                c.mean(),
                c.shape
            )));
        }
        acc.add(c.weight * v);
    }
    Ok(acc.value())
}

/// Ergodic capacity (bps/Hz) of Nakagami-m̂ fading with mean SNR `gamma_bar`:
/// `log₂e Σ_{k<m̂} e^{x} Γ(-k, x) x^k` with `x = m̂/γ̄`.
pub fn nakagami_capacity(gamma_bar: f64, m_hat: u32) -> Result<f64> {
    if !(gamma_bar > 0.0 && gamma_bar.is_finite()) || m_hat == 0 {
        return Err(Error::InvalidParams(format!(
            "nakagami_capacity needs gamma_bar > 0 and m_hat >= 1, got ({gamma_bar}, {m_hat})"
        )));
    }
    let x = m_hat as f64 / gamma_bar;
    let terms = weighted_upper_gamma_negint_all(m_hat - 1, x)?;
    let sum: CompensatedSum = terms.into_iter().collect();
    Ok(std::f64::consts::LOG2_E * sum.value())
}

/// Ergodic capacity (bps/Hz) of the κ-μ shadowed model.
pub fn shadowed_capacity(model: &MixtureModel) -> Result<f64> {
    average_metric(model, nakagami_capacity)
}

/// `Pr[γ < gamma_th]`.
pub fn outage_probability(model: &MixtureModel, gamma_th: f64) -> Result<f64> {
    model.cdf(gamma_th)
}

/// Nakagami parameter matching the Rician amount of fading:
/// `m̂ = (1+K)² / (1+2K)`.
pub fn nakagami_equiv_m(k_factor: f64) -> Result<f64> {
    if !(k_factor > 0.0 && k_factor.is_finite()) {
        return Err(Error::InvalidParams(format!("K must be positive, got {k_factor}")));
    }
    Ok((1.0 + k_factor).powi(2) / (1.0 + 2.0 * k_factor))
}

/// Rician shadowed mixture (μ = 1) used as a finite-mixture approximation of
/// Rician fading with factor `K`.
pub fn rician_shadowed_approx(k_factor: f64, m: u32, gamma_bar: f64) -> Result<MixtureModel> {
    build_mixture(&ShadowedParams::new(gamma_bar, k_factor, 1, m)?)
}

/// Sup-norm density gap between the Rician shadowed mixture and the Rician
/// (κ-μ with μ = 1) density on the diagnostic grid.
pub fn rician_pdf_gap(k_factor: f64, m: u32, gamma_bar: f64) -> Result<f64> {
    let model = rician_shadowed_approx(k_factor, m, gamma_bar)?;
    let mut gap: f64 = 0.0;
    for x in diagnostic_grid(gamma_bar) {
        let d = (model.pdf(x)? - pdf_kappa_mu(gamma_bar, k_factor, 1.0, x)?).abs();
        gap = gap.max(d);
    }
    Ok(gap)
}

/// Sup-norm CDF gaps between κ-μ shadowed models of increasing m and the κ-μ
/// limit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub m_values: Vec<u32>,
    pub sup_gaps: Vec<f64>,
}

fn kappa_mu_cdf_grid(kappa: f64, mu: u32, gamma_bar: f64, grid: &[f64]) -> Result<Vec<f64>> {
    quad_cdf_grid(
        |x| pdf_kappa_mu(gamma_bar, kappa, mu as f64, x),
        grid,
        &QuadTolerance::relative(1e-12),
    )
}

/// For each `m`, `sup_x |F_S(x) - F_KM(x)|` over the diagnostic grid, with
/// `F_KM` from quadrature of the κ-μ density.
pub fn convergence_gap(kappa: f64, mu: u32, gamma_bar: f64, m_list: &[u32]) -> Result<ConvergenceReport> {
    let grid = diagnostic_grid(gamma_bar);
    let target = kappa_mu_cdf_grid(kappa, mu, gamma_bar, &grid)?;
    let sup_gaps = m_list
        .par_iter()
        .map(|&m| {
            let model = build_mixture(&ShadowedParams::new(gamma_bar, kappa, mu, m)?)?;
            grid.iter()
                .zip(&target)
                .try_fold(0.0f64, |acc, (&x, &f)| Ok(acc.max((model.cdf(x)? - f).abs())))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(ConvergenceReport {
        m_values: m_list.to_vec(),
        sup_gaps,
    })
}

/// `E[φ(γ)]` under the κ-μ limit and under each κ-μ shadowed model in
/// `m_list`, all by quadrature. Returns `(limit, per_m)`.
pub fn expectation_sequence<Phi>(
    kappa: f64,
    mu: u32,
    gamma_bar: f64,
    m_list: &[u32],
    phi: Phi,
) -> Result<(f64, Vec<f64>)>
where
    Phi: Fn(f64) -> f64 + Sync,
{
    let tol = QuadTolerance::relative(1e-11);
    let limit = quad_expect(
        |x| pdf_kappa_mu(gamma_bar, kappa, mu as f64, x),
        &phi,
        0.0,
        Upper::Infinite(kappa_mu_envelope(gamma_bar, kappa, mu as f64)),
        &tol,
    )?;
    let per_m = m_list
        .par_iter()
        .map(|&m| {
            let model = build_mixture(&ShadowedParams::new(gamma_bar, kappa, mu, m)?)?;
            let env = Envelope::from(&model);
            quad_expect(|x| model.pdf(x), &phi, 0.0, Upper::Infinite(env), &tol)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok((limit, per_m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::nakagami_pdf;

    fn model(g: f64, k: f64, mu: u32, m: u32) -> MixtureModel {
        build_mixture(&ShadowedParams::new(g, k, mu, m).unwrap()).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    fn capacity_by_quadrature(g: f64, m_hat: u32) -> f64 {
        quad_expect(
            |x| nakagami_pdf(g, m_hat, x),
            |x| (1.0 + x).log2(),
            0.0,
            Upper::Infinite(Envelope {
                shape: m_hat as f64,
                scale: g / m_hat as f64,
            }),
            &QuadTolerance::relative(1e-12),
        )
        .unwrap()
    }

    #[test]
    fn average_metric_identities() {
        for mm in [model(1.0, 5.0, 3, 2), model(2.0, 1.0, 1, 4)] {
            assert!((average_metric(&mm, |_, _| Ok(1.0)).unwrap() - 1.0).abs() < 1e-12);
            let g = mm.params().gamma_bar();
            assert!(rel(average_metric(&mm, |mean, _| Ok(mean)).unwrap(), g) < 1e-10);
        }
        let mm = model(1.0, 5.0, 3, 2);
        assert!(matches!(
            average_metric(&mm, |_, _| Ok(f64::INFINITY)),
            Err(Error::MetricEvaluationFailure(_))
        ));
    }

    #[test]
    fn nakagami_capacity_examples() {
        let c = nakagami_capacity(1.0, 1).unwrap();
        assert!((c - 0.860_34).abs() < 1e-5);
        assert!(rel(c, capacity_by_quadrature(1.0, 1)) < 1e-9);
        let g = 1e-6;
        let c = nakagami_capacity(g, 2).unwrap();
        assert!(c > 0.0 && c < g * std::f64::consts::LOG2_E * 1.01);
        assert!(rel(nakagami_capacity(10.0, 4).unwrap(), capacity_by_quadrature(10.0, 4)) < 1e-6);
        assert!(nakagami_capacity(0.0, 1).is_err());
        assert!(nakagami_capacity(1.0, 0).is_err());
    }

    #[test]
    fn capacity_collapse_and_quadrature() {
        let mm = model(1.0, 3.0, 2, 2);
        assert!(rel(shadowed_capacity(&mm).unwrap(), nakagami_capacity(1.0, 2).unwrap()) < 1e-14);
        let mm = model(1.0, 5.0, 3, 2);
        let q = quad_expect(
            |x| mm.pdf(x),
            |x| (1.0 + x).log2(),
            0.0,
            Upper::Infinite(Envelope::from(&mm)),
            &QuadTolerance::relative(1e-12),
        )
        .unwrap();
        assert!(rel(shadowed_capacity(&mm).unwrap(), q) < 1e-6);
    }

    #[test]
    fn outage_examples() {
        let mm = model(1.0, 3.0, 2, 2);
        assert_eq!(outage_probability(&mm, 0.0).unwrap(), 0.0);
        assert!((outage_probability(&mm, 1.0).unwrap() - 0.593994).abs() < 1e-6);
        assert!(outage_probability(&mm, 50.0).unwrap() >= 1.0 - 1e-10);
        assert!(outage_probability(&mm, -1.0).is_err());
    }

    #[test]
    fn nakagami_equivalence_constants() {
        assert!((nakagami_equiv_m(3.0).unwrap() - 16.0 / 7.0).abs() < 1e-15);
        assert!((nakagami_equiv_m(10.0).unwrap() - 121.0 / 21.0).abs() < 1e-15);
        assert!((nakagami_equiv_m(1e-9).unwrap() - 1.0).abs() < 1e-8);
        assert!(nakagami_equiv_m(0.0).is_err());
    }

    #[test]
    fn rician_single_component() {
        let mm = rician_shadowed_approx(3.0, 1, 1.0).unwrap();
        assert_eq!(mm.components().len(), 1);
    }

    #[test]
    fn kappa_floor_only_blocks_improper_regime() {
        assert!(convergence_gap(1e-3, 1, 1.0, &[1, 3]).is_ok());
        let err = convergence_gap(5e-4, 3, 1.0, &[2]).unwrap_err();
        assert!(matches!(err, Error::KappaTooSmall { .. }));
    }
}

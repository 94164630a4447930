//! Fit integer (μ, m) and κ to a synthetic sample, with Rician and Nakagami
//! baselines scored on the same log-CDF error.
//!
//!     cargo run --release --example fit_synthetic

use fadekit::fitting::{fit, EmpiricalSample, ModelKind};
use fadekit::model::ShadowedParams;
use fadekit::sampling::{sample, RngState};

fn main() -> fadekit::Result<()> {
    let truth = ShadowedParams::new(1.0, 5.0, 3, 1)?;
    let draws = sample(&truth, 100_000, &mut RngState::new(1))?;
    let data = EmpiricalSample::new(draws)?;

    let result = fit(
        &data,
        5,
        5,
        &[ModelKind::ShadowedInt, ModelKind::Rician, ModelKind::Nakagami],
    )?;
    println!("truth: κ = 5, μ = 3, m = 1");
    for kind in [ModelKind::ShadowedInt, ModelKind::Rician, ModelKind::Nakagami] {
        if let Some(c) = result.best_of(kind) {
            println!(
                "{kind:?}: κ = {:?}, μ = {:?}, m = {:?}, ε = {:.4}",
                c.kappa, c.mu, c.m, c.epsilon
            );
        }
    }
    println!("winner: {:?} with ε = {:.4}", result.model, result.epsilon);
    Ok(())
}

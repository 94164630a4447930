//! Any metric known in closed form for Nakagami-m̂ fading lifts to the shadowed
//! model as a finite weighted sum. Here the metric is E[e^{-sγ}], whose
//! Nakagami form is (1 + sγ̄/m̂)^{-m̂}; the lifted value must equal the MGF.
//! Also shown: outage probability and capacity.
//!
//!     cargo run --example lifted_metric

use fadekit::metrics::{average_metric, outage_probability, shadowed_capacity};
use fadekit::model::{build_mixture, ShadowedParams};

fn main() -> fadekit::Result<()> {
    let model = build_mixture(&ShadowedParams::new(2.0, 5.0, 3, 2)?)?;
    for s in [0.1, 1.0, 5.0] {
        let lifted = average_metric(&model, |g, m| Ok((1.0 + s * g / m as f64).powi(-(m as i32))))?;
        println!("E[e^(-{s}γ)]: lifted {lifted:.15}, mgf {:.15}", model.mgf(-s)?);
    }
    println!("capacity {:.6} bps/Hz", shadowed_capacity(&model)?);
    for th in [0.1, 0.5, 1.0] {
        println!("P(γ < {th}) = {:.6e}", outage_probability(&model, th)?);
    }
    Ok(())
}

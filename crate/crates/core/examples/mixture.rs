//! Gamma mixture behind a κ-μ shadowed model, in both regimes.
//!
//!     cargo run --example mixture

use fadekit::model::{build_mixture, ShadowedParams};

fn main() -> fadekit::Result<()> {
    for (kappa, mu, m) in [(2.0, 2, 5), (5.0, 3, 2)] {
        let params = ShadowedParams::new(1.0, kappa, mu, m)?;
        let model = build_mixture(&params)?;
        println!("κ = {kappa}, μ = {mu}, m = {m}: {:?} regime", model.regime());
        for c in model.components() {
            println!("  weight {:+.6e}  shape {:>2}  scale {:.6}", c.weight, c.shape, c.scale);
        }
        println!(
            "  Σ weights = {:.15}, mean = {:.15}\n",
            model.weight_sum(),
            model.mean()
        );
    }
    Ok(())
}

//! Ergodic capacity against mean SNR for several shadowing levels, next to
//! the AWGN bound log2(1 + γ̄).
//!
//!     cargo run --release --example capacity_curves

use fadekit::metrics::shadowed_capacity;
use fadekit::model::{build_mixture, ShadowedParams};
use fadekit::numerics::linspace;

fn main() -> fadekit::Result<()> {
    let ms = [1, 2, 3, 6];
    for kappa in [1.0, 10.0] {
        println!("κ = {kappa}, μ = 3");
        print!("{:>7}", "dB");
        for m in ms {
            print!("{:>10}", format!("m={m}"));
        }
        println!("{:>10}", "AWGN");
        for db in linspace(0.0, 30.0, 7) {
            let g = 10f64.powf(db / 10.0);
            print!("{db:>7.1}");
            for m in ms {
                let model = build_mixture(&ShadowedParams::new(g, kappa, 3, m)?)?;
                print!("{:>10.4}", shadowed_capacity(&model)?);
            }
            println!("{:>10.4}", (1.0 + g).log2());
        }
        println!();
    }
    Ok(())
}

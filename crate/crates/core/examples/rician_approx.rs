//! Rician fading approximated by Rician shadowed mixtures (μ = 1) of growing
//! m, compared with the usual Nakagami moment match.
//!
//!     cargo run --release --example rician_approx

use fadekit::metrics::{nakagami_equiv_m, rician_pdf_gap};

fn main() -> fadekit::Result<()> {
    for k in [3.0, 10.0] {
        println!("K = {k}: Nakagami match m̂ = {:.4}", nakagami_equiv_m(k)?);
        for m in [1, 2, 5, 10, 20, 50] {
            println!("  m = {m:>2}: sup pdf gap {:.3e}", rician_pdf_gap(k, m, 1.0)?);
        }
    }
    Ok(())
}

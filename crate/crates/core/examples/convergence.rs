//! As m grows the shadowed model approaches the κ-μ distribution. Prints the
//! sup-norm CDF gap and the gap in a few expectations.
//!
//!     cargo run --release --example convergence

use fadekit::metrics::{convergence_gap, expectation_sequence};

fn main() -> fadekit::Result<()> {
    let ms = [2, 5, 20, 100, 500];
    let report = convergence_gap(5.0, 3, 1.0, &ms)?;
    println!("sup |F_m - F_κμ| at κ = 5, μ = 3:");
    for (m, g) in report.m_values.iter().zip(&report.sup_gaps) {
        println!("  m = {m:>3}: {g:.3e}");
    }

    let (limit, per_m) = expectation_sequence(5.0, 3, 1.0, &ms, |x| (1.0 + x).log2())?;
    println!("E[log2(1+γ)]: κ-μ limit {limit:.8}");
    for (m, v) in ms.iter().zip(per_m) {
        println!("  m = {m:>3}: {v:.8}");
    }
    Ok(())
}

//! pdf and cdf on a log grid, checked against the closed-form density and
//! adaptive quadrature.
//!
//!     cargo run --release --example density_curves

use fadekit::model::{build_mixture, ShadowedParams};
use fadekit::numerics::logspace;
use fadekit::oracle::{pdf_direct, quad_cdf_grid, QuadTolerance, RealShadowedParams};

fn main() -> fadekit::Result<()> {
    let params = ShadowedParams::new(1.0, 10.0, 6, 1)?;
    let model = build_mixture(&params)?;
    let real = RealShadowedParams::from(params);
    let xs = logspace(1e-3, 10.0, 13);
    let reference = quad_cdf_grid(|x| pdf_direct(&real, x), &xs, &QuadTolerance::relative(1e-12))?;

    println!(
        "{:>10} {:>14} {:>14} {:>10} {:>10}",
        "x", "pdf", "cdf", "pdf err", "cdf err"
    );
    for (&x, &fq) in xs.iter().zip(&reference) {
        let (f, cdf) = (model.pdf(x)?, model.cdf(x)?);
        let d = pdf_direct(&real, x)?;
        println!(
            "{x:>10.4e} {f:>14.6e} {cdf:>14.6e} {:>10.1e} {:>10.1e}",
            ((f - d) / d).abs(),
            ((cdf - fq) / fq).abs()
        );
    }
    Ok(())
}

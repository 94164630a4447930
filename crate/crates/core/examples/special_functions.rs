//! The special functions underneath: Kummer 1F1, modified Bessel I, and the
//! incomplete gamma at negative integer order.
//!
//!     cargo run --example special_functions

use fadekit::special::{bessel_i, kummer_1f1, scaled_upper_gamma_negint, SeriesControl};

fn main() -> fadekit::Result<()> {
    let ctl = SeriesControl::default();
    for z in [-50.0, -1.0, 1.0, 50.0] {
        let direct = kummer_1f1(1.5, 4.0, z, &ctl)?;
        let transformed = z.exp() * kummer_1f1(2.5, 4.0, -z, &ctl)?;
        println!("1F1(1.5; 4; {z:>5}) = {direct:.15e}  (Kummer transform {transformed:.15e})");
    }
    println!("I_0.5(2) = {:.15}", bessel_i(0.5, 2.0, &ctl)?);
    for k in 0..4 {
        println!("e^x Γ(-{k}, 1.5) = {:.15e}", scaled_upper_gamma_negint(k, 1.5)?);
    }
    Ok(())
}

//! Scaling a metric by c divides eigenvalues by c^2 and multiplies volume by c^n.

use hodge_diabolo::complex::{homothety, volume};
use hodge_diabolo::fixtures;
use hodge_diabolo::spectral::coexact_spectrum;

fn main() -> hodge_diabolo::error::Result<()> {
    let k = fixtures::torus();
    let w = fixtures::random_weights(&k, 1);
    for c in [0.5, 2.0, 3.0] {
        let s = homothety(&w, c, 2)?;
        let a = coexact_spectrum(&k, &w, 1)?.values[0];
        let b = coexact_spectrum(&k, &s, 1)?.values[0];
        println!("c = {c}: mu ratio {:.12} (c^-2 = {:.12}), volume ratio {:.12}", b / a, c.powi(-2), volume(&s) / volume(&w));
    }
    Ok(())
}

//! Products of complete graphs with a small sphere: the first degree-one
//! coexact eigenvalue has multiplicity k.

use hodge_diabolo::prescribe::high_multiplicity_example;

fn main() -> hodge_diabolo::error::Result<()> {
    for k in [3, 5, 8] {
        let (prod, r) = high_multiplicity_example(1, k)?;
        println!(
            "k = {k}: {} degree-one cochains, mu1 = {:.6} with multiplicity {}, betti {:?}, holds {}",
            prod.cochain_dim(1),
            r.mu1,
            r.multiplicity,
            prod.betti(),
            r.holds()
        );
    }
    Ok(())
}

//! Full and coexact spectra of the fixtures, with the decomposition check.

use hodge_diabolo::complex::{betti_by_rank, WeightSystem};
use hodge_diabolo::fixtures;
use hodge_diabolo::spectral::{coexact_spectrum, full_spectrum, hodge_consistency};

fn main() -> hodge_diabolo::error::Result<()> {
    for (name, k) in [
        ("triangle", fixtures::triangle_boundary()),
        ("tetrahedron", fixtures::tetrahedron_boundary()),
        ("octahedron", fixtures::octahedron_boundary()),
        ("torus", fixtures::torus()),
    ] {
        let w = WeightSystem::uniform(&k);
        println!("{name}: betti {:?}", betti_by_rank(&k));
        for p in 0..=k.top_dim() {
            let full = full_spectrum(&k, &w, p)?;
            let coex = coexact_spectrum(&k, &w, p)?.values;
            let r = hodge_consistency(&k, &w, p)?;
            println!("  p = {p}: {} eigenvalues, {} coexact, deviation {:.1e}", full.len(), coex.len(), r.max_deviation);
            println!("    lowest coexact {:?}", &coex[..coex.len().min(4)]);
        }
    }
    Ok(())
}

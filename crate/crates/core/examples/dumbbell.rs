//! The degree-one dumbbell: one small coexact eigenvalue that vanishes with
//! the neck, everything else above a floor, and an odd small mode.

use hodge_diabolo::gluing::dumbbell;

fn main() -> hodge_diabolo::error::Result<()> {
    let mut prev = None;
    for u in [1e-1, 1e-2, 1e-3, 1e-4] {
        let r = dumbbell(3, 1, u)?.contract()?;
        let ratio = prev.map(|m: f64| r.mu1 / m);
        println!(
            "u = {u:.0e}: mu1 {:.3e}, mu2 {:.3}, floor {}, oddness {:+.12}, decay {:?}, holds {}",
            r.mu1, r.mu2, r.floor, r.symmetry_ratio, ratio, r.holds()
        );
        prev = Some(r.mu1);
    }
    Ok(())
}

//! Two dumbbells on an octahedron: the glued spectrum tends to the union as
//! the handles thin out.

use hodge_diabolo::fixtures;
use hodge_diabolo::gluing::{convergence_scan, dumbbell, AttachmentSpec};

fn main() -> hodge_diabolo::error::Result<()> {
    let (k, w) = fixtures::diabolo_base();
    let g1 = dumbbell(3, 1, 0.01)?;
    let g2 = dumbbell(3, 1, 0.003)?;
    let s1 = AttachmentSpec::single(k.simplices(1)[0].clone(), g1.sites()[0].clone(), 1.0)?;
    let s2 = AttachmentSpec::single(k.simplices(1)[5].clone(), g2.sites()[0].clone(), 1.0)?;
    let parts = [((&g1.complex, &g1.weights), &s1), ((&g2.complex, &g2.weights), &s2)];
    let scan = convergence_scan((&k, &w), &parts, 1, &[1e-1, 1e-2, 1e-3, 1e-4, 1e-5], 5, (0.0, 0.1))?;
    println!("reference {:?}", scan.reference);
    for row in &scan.rows {
        println!("eps {:.0e}: max deviation {:.2e}, subspace distance {:.2e}", row.eps, row.max_deviation, row.subspace_distance);
    }
    Ok(())
}

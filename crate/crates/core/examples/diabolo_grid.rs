//! Window eigenvalues of the glued family on a grid, written as CSV for
//! plotting the double cone.

use hodge_diabolo::diabolo::{diabolo_grid, grid_csv, FamilyParams, GluedFamily};
use hodge_diabolo::fixtures;

fn main() -> hodge_diabolo::error::Result<()> {
    let params =
        FamilyParams { n: 3, p: 1, lambda1: 1.0, eta: 0.25, eps: 0.5, u: 0.01, window: (0.5, 1.5), theta_origin: 0.0 };
    let (k, w) = fixtures::diabolo_base();
    let family = GluedFamily::new(params.clone(), (&k, &w))?;
    let rows = diabolo_grid(&family, &params.domain(), 11, 9)?;
    let path = std::env::temp_dir().join("diabolo_grid.csv");
    std::fs::write(&path, grid_csv(&rows))?;
    let min = rows.iter().min_by(|a, b| (a.mu2 - a.mu1).total_cmp(&(b.mu2 - b.mu1))).expect("grid is nonempty");
    println!("{} rows written to {}", rows.len(), path.display());
    println!("smallest gap {:.3e} at ({:.3}, {:.3})", min.mu2 - min.mu1, min.lambda2, min.theta);
    Ok(())
}

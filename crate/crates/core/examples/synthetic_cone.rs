//! Locates the conical point of a 2x2 family and checks the sign flip of the
//! transported eigenvector.

use hodge_diabolo::diabolo::{eigenline_holonomy, find_degeneracy, DomainRect, QuadraticForm2, SearchOptions, SyntheticFamily};

fn main() -> hodge_diabolo::error::Result<()> {
    let family = SyntheticFamily::new(|a: f64, b: f64| QuadraticForm2::from_xy(a - 0.3, 2.0 * (b - 1.1) + 0.5 * (a - 0.3), 1.0));
    let domain = DomainRect { lambda2: (0.0, 1.0), theta: (0.5, 1.5) };
    let opts = SearchOptions::new(&domain, 1e-6);
    let d = find_degeneracy(&family, &domain, &opts)?;
    let h = eigenline_holonomy(&family, &domain.boundary(), &opts.boundary)?;
    println!("point {:?}, gap {:.1e}, winding {}, holonomy {}", d.point, d.gap, d.winding, h.sign);
    Ok(())
}

//! A metric on the octahedron with a double coexact eigenvalue 1 in degree
//! one, the rest of the low spectrum above 10 and volume below 100.

use hodge_diabolo::complex::WeightSystem;
use hodge_diabolo::diabolo::double_eigenvalue_metric;
use hodge_diabolo::fixtures;

fn main() -> hodge_diabolo::error::Result<()> {
    let k = fixtures::octahedron_boundary();
    let w = WeightSystem::uniform(&k);
    let m = double_eigenvalue_metric((&k, &w), 3, 1, 1.0, 10.0, 100.0)?;
    println!("{}", serde_json::to_string_pretty(&m)?);
    println!("all checks hold: {}", m.check.holds());
    Ok(())
}

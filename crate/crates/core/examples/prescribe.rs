//! Prescribes the degree-one coexact spectrum {1, 2, 2} at volume 50.

use hodge_diabolo::complex::WeightSystem;
use hodge_diabolo::fixtures;
use hodge_diabolo::prescribe::{prescribe_spectrum, TargetSpectrum};

fn main() -> hodge_diabolo::error::Result<()> {
    let k = fixtures::octahedron_boundary();
    let w = WeightSystem::uniform(&k);
    let targets = TargetSpectrum::parse(r#"{"targets": {"1": [1.0, 2.0, 2.0]}, "volume": 50.0, "tol": 1e-3, "ceiling": 10.0}"#)?;
    let r = prescribe_spectrum((&k, &w), &targets)?;
    println!("{}", serde_json::to_string_pretty(&r.report)?);
    Ok(())
}

//! Certifies a double eigenvalue in the glued two-gadget family.

use hodge_diabolo::diabolo::{certify, FamilyParams, GluedFamily, SearchOptions};
use hodge_diabolo::fixtures;

fn main() -> hodge_diabolo::error::Result<()> {
    let params =
        FamilyParams { n: 3, p: 1, lambda1: 1.0, eta: 0.25, eps: 0.5, u: 0.01, window: (0.5, 1.5), theta_origin: 0.0 };
    let (k, w) = fixtures::diabolo_base();
    let family = GluedFamily::new(params.clone(), (&k, &w))?;
    let domain = params.domain();
    let cert = certify(&family, &domain, &SearchOptions::new(&domain, 1e-4))?;
    println!("{}", serde_json::to_string_pretty(&cert)?);
    Ok(())
}

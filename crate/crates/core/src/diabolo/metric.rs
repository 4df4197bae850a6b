use std::f64::consts::PI;

use serde::Serialize;

use super::domain::DomainRect;
use super::family::{FamilyParams, FormFamily, GluedFamily};
use super::search::{find_degeneracy, Degeneracy, SearchOptions};
use crate::complex::{homothety, volume, SimplicialComplex, WeightSystem};
use crate::error::{Error, Result};
use crate::gluing::{dumbbell, Weighted};
use crate::spectral::coexact_spectrum;

/// Attempts allowed by [`search_with_retries`].
const ATTEMPTS: usize = 8;

/// Runs [`find_degeneracy`] on `build(theta_origin, eta)` over
/// `[lambda1 - eta, lambda1 + eta] x [0, pi]`, moving away from boundary
/// degeneracies: a hit on a `theta` edge shifts the origin by `pi/8`, a hit on
/// a `lambda2` edge shrinks `eta` by 0.8.
pub fn search_with_retries<F, B>(build: B, lambda1: f64, eta: f64, tol: f64) -> Result<(F, Degeneracy)>
where
    F: FormFamily,
    B: Fn(f64, f64) -> Result<F>,
{
    let (mut origin, mut eta) = (0.0, eta);
    let mut last = Error::NoCertificate;
    for _ in 0..ATTEMPTS {
        let fam = build(origin, eta)?;
        let domain = DomainRect::around(lambda1, eta);
        match find_degeneracy(&fam, &domain, &SearchOptions::new(&domain, tol)) {
            Ok(d) => return Ok((fam, d)),
            Err(e @ Error::GuardViolated(a, _, _)) => {
                let on_side = (a - domain.lambda2.0).abs() <= 1e-12 * eta || (a - domain.lambda2.1).abs() <= 1e-12 * eta;
                if on_side {
                    eta *= 0.8;
                } else {
                    origin += PI / 8.0;
                }
                last = e;
            }
            Err(e) => return Err(e),
        }
    }
    Err(last)
}

/// Independent checks on a metric with a prescribed double eigenvalue.
#[derive(Clone, Debug, Serialize)]
pub struct MetricCheck {
    pub nu: f64,
    pub ceiling: f64,
    pub volume_budget: f64,
    /// The three lowest coexact eigenvalues in the target degree.
    pub mu: Vec<f64>,
    /// First coexact eigenvalue in each other tested degree.
    pub others: Vec<(usize, f64)>,
    pub volume: f64,
    pub double_at_target: bool,
    pub third_above_ceiling: bool,
    pub others_above_ceiling: bool,
    pub volume_below_budget: bool,
}

impl MetricCheck {
    pub fn measure(k: &SimplicialComplex, w: &WeightSystem, n: usize, p: usize, nu: f64, ceiling: f64, budget: f64) -> Result<Self> {
        let spec = coexact_spectrum(k, w, p)?;
        let mu: Vec<f64> = spec.values.iter().take(3).copied().collect();
        let others: Vec<(usize, f64)> = (0..=(n - 1) / 2)
            .filter(|&q| q != p && q <= k.top_dim())
            .map(|q| Ok((q, coexact_spectrum(k, w, q)?.values.first().copied().unwrap_or(f64::INFINITY))))
            .collect::<Result<_>>()?;
        let vol = volume(w);
        Ok(MetricCheck {
            nu,
            ceiling,
            volume_budget: budget,
            double_at_target: mu.len() >= 2 && mu[..2].iter().all(|m| (m - nu).abs() <= 1e-6 * nu),
            third_above_ceiling: mu.get(2).is_some_and(|&m| m > ceiling),
            others_above_ceiling: others.iter().all(|&(_, m)| m > ceiling),
            volume_below_budget: vol < budget,
            mu,
            others,
            volume: vol,
        })
    }

    pub fn holds(&self) -> bool {
        self.double_at_target && self.third_above_ceiling && self.others_above_ceiling && self.volume_below_budget
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DoubleEigenvalueMetric {
    #[serde(skip)]
    pub complex: SimplicialComplex,
    #[serde(skip)]
    pub weights: WeightSystem,
    pub params: FamilyParams,
    pub degeneracy: Degeneracy,
    pub check: MetricCheck,
}

/// Neck parameters tried, largest first.
const NECKS: [f64; 5] = [1e-2, 3e-3, 1e-3, 3e-4, 1e-4];

/// The base spectrum is pushed this many times above `2 ceiling`: connector
/// modes grow with the base's ratio of triangle to edge weights.
const BASE_MARGIN: f64 = 16.0;

/// A metric whose degree-`p` coexact spectrum starts with the double value
/// `nu`, has its third value above `ceiling`, first values above `ceiling` in
/// the other tested degrees, and volume below `budget`.
///
/// The base is rescaled so that its spectrum exceeds `2 ceiling` and its volume
/// is below `budget / 10`. Two gadgets are tuned inside the window
/// `(nu/2, 3nu/2)` with the neck chosen so their other eigenvalues exceed
/// `2 ceiling`; the degenerate point of the family is located and a final
/// homothety moves the double value onto `nu`. The result is checked from a
/// fresh eigensolve; a failed check moves on to the next smaller neck, and the
/// last attempt is returned with its check either way.
pub fn double_eigenvalue_metric(
    base: Weighted<'_>,
    n: usize,
    p: usize,
    nu: f64,
    ceiling: f64,
    budget: f64,
) -> Result<DoubleEigenvalueMetric> {
    if !(nu > 0.0 && nu < ceiling) {
        return Err(Error::PreconditionViolated(format!("need 0 < nu < C, got nu = {nu}, C = {ceiling}")));
    }
    if !(budget > 0.0) {
        return Err(Error::PreconditionViolated(format!("volume budget must be positive, got {budget}")));
    }
    let (k, w) = base;
    let lowest = (0..=k.top_dim())
        .map(|q| Ok(coexact_spectrum(k, w, q)?.values.first().copied().unwrap_or(f64::INFINITY)))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    let c_spec = if lowest.is_finite() { (lowest / (BASE_MARGIN * 2.0 * ceiling)).sqrt() } else { 1.0 };
    let c_vol = (budget / (10.0 * volume(w))).powf(1.0 / n as f64);
    let base_w = homothety(w, 0.99 * c_spec.min(c_vol), n)?;

    let (lambda1, eta) = (nu, nu / 4.0);
    let mut last = None;
    for u in necks(n, p, lambda1 - eta, 2.0 * ceiling)? {
        let params = FamilyParams { n, p, lambda1, eta, eps: 0.5, u, window: (nu / 2.0, 1.5 * nu), theta_origin: 0.0 };
        let fam = GluedFamily::new(params, (k, &base_w))?;
        let (fam, degeneracy) = search_with_retries(|o, e| fam.reparametrised(o, e), lambda1, eta, 1e-9)?;
        let glued = fam.glued(degeneracy.point.0, degeneracy.point.1)?;
        let spec = coexact_spectrum(&glued.complex, &glued.weights, p)?;
        let measured = 0.5 * (spec.values[0] + spec.values[1]);
        let weights = homothety(&glued.weights, (measured / nu).sqrt(), n)?;
        let check = MetricCheck::measure(&glued.complex, &weights, n, p, nu, ceiling, budget)?;
        if !check.volume_below_budget {
            return Err(Error::VolumeBudgetExceeded { volume: check.volume, budget });
        }
        let done = check.holds();
        last = Some(DoubleEigenvalueMetric { complex: glued.complex, weights, params: fam.params, degeneracy, check });
        if done {
            break;
        }
    }
    last.ok_or_else(|| Error::PreconditionViolated("no admissible neck".into()))
}

/// Tabulated necks, largest first, for which a gadget tuned down to
/// `lowest_target` keeps every other eigenvalue above `floor`.
pub fn necks(n: usize, p: usize, lowest_target: f64, floor: f64) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for &u in &NECKS {
        let g = dumbbell(n, p, u)?;
        let spec = g.coexact(p)?;
        let scale = lowest_target / spec.values[0];
        let mut rest = vec![spec.values[1]];
        for q in g.other_degrees() {
            rest.extend(g.coexact(q)?.values.first());
        }
        if rest.iter().all(|&m| m * scale > floor) {
            out.push(u);
        }
    }
    if out.is_empty() {
        return Err(Error::PreconditionViolated(format!("no tabulated neck keeps the gadget spectrum above {floor}")));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diabolo::family::SyntheticFamily;
    use crate::diabolo::form::QuadraticForm2;
    use crate::fixtures;

    #[test]
    fn ceiling_below_target_rejected() {
        let k = fixtures::octahedron_boundary();
        let w = WeightSystem::uniform(&k);
        let err = double_eigenvalue_metric((&k, &w), 3, 1, 1.0, 0.5, 100.0).unwrap_err();
        assert!(matches!(err, Error::PreconditionViolated(_)));
    }

    #[test]
    fn degeneracy_on_axis_moves_origin() {
        // conical points at absolute angle 0 and pi, so the unshifted domain
        // has one on its lower edge
        let build = |origin: f64, _eta: f64| {
            Ok(SyntheticFamily::new(move |a: f64, b: f64| QuadraticForm2::from_xy(a - 1.0, (origin + b).sin(), 2.0)))
        };
        let (_, d) = search_with_retries(build, 1.0, 0.25, 1e-6).unwrap();
        assert!((d.point.0 - 1.0).abs() < 1e-6);
        assert!((d.point.1 - 7.0 * PI / 8.0).abs() < 1e-6, "{:?}", d.point);
    }

    #[test]
    fn neck_table() {
        let u = necks(3, 1, 0.75, 20.0).unwrap();
        assert!(u.windows(2).all(|w| w[1] < w[0]) && u[0] <= 1e-2);
    }
}

use std::f64::consts::PI;

use serde::Serialize;

use super::targets::TargetSpectrum;
use crate::complex::{homothety, volume, SimplicialComplex, WeightSystem};
use crate::diabolo::{
    find_degeneracy, necks, search_with_retries, Assembly, Degeneracy, DomainRect, FamilyParams, GadgetSlot,
    GluedFamily, SearchOptions,
};
use crate::error::{Error, Result};
use crate::gluing::{dumbbell, Weighted};
use crate::spectral::coexact_spectrum;

/// Outer fixed-point iterations allowed.
pub const MAX_ITERATIONS: usize = 50;

/// Handle coupling used for every gadget.
const EPS: f64 = 0.5;

/// The base spectrum is pushed this many times above `2 ceiling`.
const BASE_MARGIN: f64 = 16.0;

/// Certified double value of one gadget pair.
#[derive(Clone, Debug, Serialize)]
pub struct PairReport {
    pub value: f64,
    pub lambda: [f64; 2],
    pub theta: f64,
    pub winding: i32,
    pub gap: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct PrescriptionReport {
    pub degree: usize,
    pub targets: Vec<f64>,
    /// Lowest coexact eigenvalues of the result, one per target.
    pub achieved: Vec<f64>,
    pub max_deviation: f64,
    /// First coexact eigenvalue after the targets.
    pub next_eigenvalue: f64,
    pub volume: f64,
    pub volume_target: f64,
    pub tol: f64,
    pub iterations: usize,
    /// Largest target deviation after each iteration.
    pub history: Vec<f64>,
    pub pairs: Vec<PairReport>,
    pub u: f64,
    pub eps: f64,
    pub slots: Vec<GadgetSlot>,
    /// Every check passed on a fresh eigensolve of the output.
    pub verified: bool,
}

pub struct Prescription {
    pub complex: SimplicialComplex,
    pub weights: WeightSystem,
    pub report: PrescriptionReport,
}

/// Where each target group lives in the slot list.
enum Group {
    Simple { slot: usize, index: usize, value: f64 },
    Pair { slots: [usize; 2], index: usize, value: f64, point: Option<(f64, f64)> },
}

/// Builds a metric whose low coexact spectrum in one degree is the target list
/// and whose volume is the target volume.
///
/// Each simple target gets a dumbbell gadget and each double target a pair of
/// gadgets whose degenerate point is certified by the winding search; each
/// group hangs from its own base simplex. An outer fixed-point loop retunes
/// every gadget by the residual `nu - measured` until all deviations are below
/// `tol / 10`, then the base vertex masses set the volume. The output is
/// checked again from a fresh eigensolve.
pub fn prescribe_spectrum(base: Weighted<'_>, targets: &TargetSpectrum) -> Result<Prescription> {
    targets.validate()?;
    let n = targets.n;
    let degrees: Vec<usize> = targets.targets.keys().copied().collect();
    for &p in &degrees {
        dumbbell(n, p, 0.1)?;
    }
    let [p] = degrees[..] else {
        return Err(Error::InvalidInput("prescription handles one degree per run".into()));
    };
    let values = targets.targets[&p].clone();
    let groups = targets.groups(p)?;
    let delta = targets.delta(p)?;
    let top = *values.last().expect("validated nonempty");

    let (k, w) = base;
    let sites = k.simplices(p);
    if sites.len() < groups.len() {
        return Err(Error::PreconditionViolated(format!(
            "base has {} simplices of dimension {p} for {} target groups",
            sites.len(),
            groups.len()
        )));
    }
    let lowest = (0..=k.top_dim())
        .map(|q| Ok(coexact_spectrum(k, w, q)?.values.first().copied().unwrap_or(f64::INFINITY)))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    let c = if lowest.is_finite() { 0.99 * (lowest / (BASE_MARGIN * 2.0 * targets.ceiling)).sqrt() } else { 1.0 };
    let base_w = homothety(w, c, n)?;
    let u = necks(n, p, values[0] / 2.0, 2.0 * targets.ceiling)?[0];
    let assembly = Assembly::new((k, &base_w), dumbbell(n, p, u)?, EPS)?;

    let mut slots = Vec::new();
    let mut plan = Vec::new();
    let mut index = 0;
    for (g, site) in groups.iter().zip(sites) {
        let slot = |lambda| GadgetSlot { site: site.clone(), lambda, angle: 0.0 };
        if g.multiplicity == 1 {
            plan.push(Group::Simple { slot: slots.len(), index, value: g.value });
            slots.push(slot(g.value));
        } else {
            plan.push(Group::Pair { slots: [slots.len(), slots.len() + 1], index, value: g.value, point: None });
            slots.push(slot(g.value));
            slots.push(slot(g.value));
        }
        index += g.multiplicity;
    }

    let stop = 0.1 * targets.tol;
    let mut history = Vec::new();
    let mut pairs = Vec::new();
    loop {
        pairs.clear();
        for group in plan.iter_mut() {
            if let Group::Pair { slots: [a, b], value, point, .. } = group {
                let (d, fam) = solve_pair(&assembly, &slots, [*a, *b], *value, delta, *point)?;
                let origin = fam.params.theta_origin;
                slots[*b].lambda = d.point.0;
                slots[*b].angle = origin + d.point.1;
                *point = Some((d.point.0, origin + d.point.1));
                pairs.push(PairReport {
                    value: d.double_value,
                    lambda: [slots[*a].lambda, d.point.0],
                    theta: origin + d.point.1,
                    winding: d.winding,
                    gap: d.gap,
                });
            }
        }
        let glued = assembly.glue(&slots)?;
        let spec = coexact_spectrum(&glued.complex, &glued.weights, p)?;
        let measured = &spec.values[..values.len().min(spec.len())];
        let dev = deviation(measured, &values);
        history.push(dev);
        let it = history.len();
        if dev <= stop {
            break;
        }
        if it >= MAX_ITERATIONS || (it > 1 && dev > history[it - 2]) {
            return Err(Error::NonConvergence { iterations: it, deviation: dev });
        }
        for group in &plan {
            match *group {
                Group::Simple { slot, index, value } => slots[slot].lambda += value - measured[index],
                Group::Pair { slots: [a, b], index, value, .. } => {
                    let shift = value - 0.5 * (measured[index] + measured[index + 1]);
                    slots[a].lambda += shift;
                    slots[b].lambda += shift;
                }
            }
        }
    }

    let glued = assembly.glue(&slots)?;
    let nb = k.count(0);
    let base_mass: f64 = glued.weights.dim(0)[..nb].iter().sum();
    let rest = volume(&glued.weights) - base_mass;
    if rest >= targets.volume {
        return Err(Error::VolumeBudgetExceeded { volume: rest, budget: targets.volume });
    }
    let factor = (targets.volume - rest) / base_mass;
    let mut all = glued.weights.all().to_vec();
    for m in &mut all[0][..nb] {
        *m *= factor;
    }
    let weights = WeightSystem::new(&glued.complex, all)?;

    // fresh check of the emitted metric
    let spec = coexact_spectrum(&glued.complex, &weights, p)?;
    let achieved: Vec<f64> = spec.values.iter().take(values.len()).copied().collect();
    let max_deviation = deviation(&achieved, &values);
    let next_eigenvalue = spec.values.get(values.len()).copied().unwrap_or(f64::INFINITY);
    let vol = volume(&weights);
    let verified = achieved.len() == values.len()
        && max_deviation <= targets.tol
        && (vol - targets.volume).abs() <= targets.tol
        && next_eigenvalue > top
        && pairs.iter().all(|r| r.winding != 0);
    let report = PrescriptionReport {
        degree: p,
        targets: values,
        achieved,
        max_deviation,
        next_eigenvalue,
        volume: vol,
        volume_target: targets.volume,
        tol: targets.tol,
        iterations: history.len(),
        history,
        pairs,
        u,
        eps: EPS,
        slots,
        verified,
    };
    if !verified {
        return Err(Error::NonConvergence { iterations: report.iterations, deviation: max_deviation });
    }
    Ok(Prescription { complex: glued.complex, weights, report })
}

fn deviation(measured: &[f64], targets: &[f64]) -> f64 {
    if measured.len() < targets.len() {
        return f64::INFINITY;
    }
    measured.iter().zip(targets).map(|(m, t)| (m - t).abs()).fold(0.0, f64::max)
}

/// Locates the degenerate point of the pair `[a, b]` with every other slot
/// held fixed. A previous point is tried first in a small rectangle around it.
fn solve_pair(
    assembly: &Assembly,
    slots: &[GadgetSlot],
    [a, b]: [usize; 2],
    value: f64,
    delta: f64,
    previous: Option<(f64, f64)>,
) -> Result<(Degeneracy, GluedFamily)> {
    let lambda1 = slots[a].lambda;
    let eta = 0.5 * delta;
    let params = FamilyParams {
        n: assembly.gadget.n,
        p: assembly.degree(),
        lambda1,
        eta,
        eps: assembly.eps,
        u: assembly.gadget.u,
        window: (value - delta, value + delta),
        theta_origin: 0.0,
    };
    let fixed: Vec<GadgetSlot> =
        slots.iter().enumerate().filter(|&(i, _)| i != a && i != b).map(|(_, s)| s.clone()).collect();
    let pair_sites = [slots[a].site.clone(), slots[b].site.clone()];
    let fam = GluedFamily::assemble(params, assembly.clone(), pair_sites, fixed)?;
    let tol = 1e-9;
    if let Some((l2, angle)) = previous {
        let local = DomainRect { lambda2: (l2 - eta / 8.0, l2 + eta / 8.0), theta: (angle - PI / 8.0, angle + PI / 8.0) };
        if let Ok(d) = find_degeneracy(&fam, &local, &SearchOptions::new(&local, tol)) {
            return Ok((d, fam));
        }
    }
    let (fam, d) = search_with_retries(|o, e| fam.reparametrised(o, e), lambda1, eta, tol)?;
    Ok((d, fam))
}

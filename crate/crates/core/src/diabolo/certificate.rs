use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};

use rayon::prelude::*;
use serde::Serialize;

use super::family::{FamilySample, FormFamily};
use crate::error::{Error, Result};

/// Sampling and safety settings for loop certificates.
#[derive(Clone, Copy, Debug)]
pub struct LoopOptions {
    /// Initial uniform samples per polyline edge.
    pub samples_per_edge: usize,
    /// Smallest admissible `|(x, y)|` for the winding number.
    pub guard: f64,
    /// Smallest admissible `mu2 - mu1` for the holonomy.
    pub gap_floor: f64,
    /// Largest number of samples on one loop.
    pub budget: usize,
}

impl LoopOptions {
    /// Defaults for a domain of half-width `eta`: 64 samples per edge, guard
    /// `1e-6 eta`, gap floor `1e-8`.
    pub fn for_eta(eta: f64) -> Self {
        LoopOptions { samples_per_edge: 64, guard: 1e-6 * eta, gap_floor: 1e-8, budget: 50_000 }
    }
}

impl Default for LoopOptions {
    fn default() -> Self {
        Self::for_eta(1.0)
    }
}

/// Caches family evaluations by exact parameter value and evaluates batches
/// in parallel.
pub struct Evaluator<'a, F: FormFamily + ?Sized> {
    family: &'a F,
    cache: Mutex<HashMap<(u64, u64), Arc<FamilySample>>>,
    calls: AtomicUsize,
}

impl<'a, F: FormFamily + ?Sized> Evaluator<'a, F> {
    pub fn new(family: &'a F) -> Self {
        Evaluator { family, cache: Mutex::new(HashMap::new()), calls: AtomicUsize::new(0) }
    }

    /// Number of family evaluations performed so far.
    pub fn evaluations(&self) -> usize {
        self.calls.load(Ordering::Relaxed)
    }

    pub fn get(&self, point: (f64, f64)) -> Result<Arc<FamilySample>> {
        Ok(self.get_many(&[point])?.pop().expect("one point"))
    }

    pub fn get_many(&self, points: &[(f64, f64)]) -> Result<Vec<Arc<FamilySample>>> {
        let key = |(a, b): (f64, f64)| (a.to_bits(), b.to_bits());
        let mut missing: Vec<(f64, f64)> = {
            let cache = self.cache.lock().expect("cache lock");
            points.iter().copied().filter(|&p| !cache.contains_key(&key(p))).collect()
        };
        missing.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)));
        missing.dedup();
        let fresh: Vec<Result<((u64, u64), Arc<FamilySample>)>> = missing
            .par_iter()
            .map(|&p| {
                self.calls.fetch_add(1, Ordering::Relaxed);
                Ok((key(p), Arc::new(self.family.evaluate(p.0, p.1)?)))
            })
            .collect();
        let mut cache = self.cache.lock().expect("cache lock");
        for r in fresh {
            let (k, s) = r?;
            cache.insert(k, s);
        }
        Ok(points.iter().map(|&p| cache[&key(p)].clone()).collect())
    }
}

/// Point at arc parameter `s in [0, n]` of the closed polyline `poly`.
fn position(poly: &[(f64, f64)], s: f64) -> (f64, f64) {
    let n = poly.len();
    let i = (s.floor() as usize).min(n - 1);
    let t = s - i as f64;
    let (a, b) = (poly[i], poly[(i + 1) % n]);
    if t == 0.0 {
        return a;
    }
    (a.0 + t * (b.0 - a.0), a.1 + t * (b.1 - a.1))
}

/// Samples `poly` uniformly, then bisects every step flagged by `coarse`
/// until none is left. `reject` inspects each new sample. The last sample
/// repeats the first point.
fn trace<F: FormFamily + ?Sized>(
    eval: &Evaluator<'_, F>,
    poly: &[(f64, f64)],
    opts: &LoopOptions,
    reject: &dyn Fn((f64, f64), &FamilySample) -> Option<Error>,
    coarse: &dyn Fn(&FamilySample, &FamilySample) -> bool,
) -> Result<Vec<Arc<FamilySample>>> {
    if poly.len() < 2 {
        return Err(Error::InvalidInput("a loop needs at least two vertices".into()));
    }
    let n = poly.len();
    let per = opts.samples_per_edge.max(1);
    let mut params: Vec<f64> = (0..n).flat_map(|i| (0..per).map(move |k| i as f64 + k as f64 / per as f64)).collect();
    params.push(n as f64);
    let at = |s: f64| if s >= n as f64 { poly[0] } else { position(poly, s) };
    let check = |pts: &[(f64, f64)], samples: &[Arc<FamilySample>]| -> Result<()> {
        for (&p, s) in pts.iter().zip(samples) {
            if let Some(e) = reject(p, s) {
                return Err(e);
            }
        }
        Ok(())
    };
    let mut points: Vec<(f64, f64)> = params.iter().map(|&s| at(s)).collect();
    let mut samples = eval.get_many(&points)?;
    check(&points, &samples)?;
    loop {
        let split: Vec<usize> = (0..params.len() - 1).filter(|&i| coarse(&samples[i], &samples[i + 1])).collect();
        if split.is_empty() {
            return Ok(samples);
        }
        if params.len() + split.len() > opts.budget {
            return Err(Error::RefinementBudgetExceeded(opts.budget));
        }
        let mids: Vec<f64> = split.iter().map(|&i| 0.5 * (params[i] + params[i + 1])).collect();
        if split.iter().zip(&mids).any(|(&i, &m)| m <= params[i] || m >= params[i + 1]) {
            return Err(Error::RefinementBudgetExceeded(params.len()));
        }
        let mid_points: Vec<(f64, f64)> = mids.iter().map(|&s| at(s)).collect();
        let mid_samples = eval.get_many(&mid_points)?;
        check(&mid_points, &mid_samples)?;
        let mut np = Vec::with_capacity(params.len() + mids.len());
        let (mut npts, mut ns) = (Vec::with_capacity(np.capacity()), Vec::with_capacity(np.capacity()));
        let mut next = split.iter().zip(mids.iter().zip(mid_points.iter().zip(mid_samples))).peekable();
        for i in 0..params.len() {
            np.push(params[i]);
            npts.push(points[i]);
            ns.push(samples[i].clone());
            if let Some((_, (m, (mp, ms)))) = next.next_if(|(&j, _)| j == i) {
                np.push(*m);
                npts.push(*mp);
                ns.push(ms);
            }
        }
        params = np;
        points = npts;
        samples = ns;
    }
}

fn wrap(d: f64) -> f64 {
    let r = (d + PI).rem_euclid(2.0 * PI) - PI;
    if r == -PI {
        PI
    } else {
        r
    }
}

fn angle(s: &FamilySample) -> f64 {
    s.form.y().atan2(s.form.x())
}

#[derive(Clone, Debug, Serialize)]
pub struct WindingReport {
    pub winding: i32,
    /// Smallest `|(x, y)|` over the samples.
    pub min_radius: f64,
    pub samples: usize,
}

/// Winding number of `(x, y)` around the origin along the closed polyline.
pub fn loop_winding<F: FormFamily + ?Sized>(
    family: &F,
    poly: &[(f64, f64)],
    opts: &LoopOptions,
) -> Result<WindingReport> {
    winding_with(&Evaluator::new(family), poly, opts)
}

pub(crate) fn winding_with<F: FormFamily + ?Sized>(
    eval: &Evaluator<'_, F>,
    poly: &[(f64, f64)],
    opts: &LoopOptions,
) -> Result<WindingReport> {
    let guard = opts.guard;
    let reject = move |p: (f64, f64), s: &FamilySample| {
        let r = s.form.radius();
        (r < guard).then(|| Error::GuardViolated(p.0, p.1, r))
    };
    let coarse = |a: &FamilySample, b: &FamilySample| wrap(angle(b) - angle(a)).abs() >= FRAC_PI_2;
    let t = trace(eval, poly, opts, &reject, &coarse)?;
    let total: f64 = t.windows(2).map(|w| wrap(angle(&w[1]) - angle(&w[0]))).sum();
    Ok(WindingReport {
        winding: (total / (2.0 * PI)).round() as i32,
        min_radius: t.iter().map(|s| s.form.radius()).fold(f64::INFINITY, f64::min),
        samples: t.len(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct HolonomyReport {
    /// `+1` if the transported eigenvector returns to itself, `-1` if reversed.
    pub sign: i8,
    pub min_gap: f64,
    pub samples: usize,
}

/// Overlap below which consecutive eigenvectors are considered too far apart
/// to continue the sign reliably.
const MIN_OVERLAP: f64 = 0.8;

/// Transports the lower eigenvector around the loop, choosing at each step the
/// sign with positive overlap, and compares the result with the start.
pub fn eigenline_holonomy<F: FormFamily + ?Sized>(
    family: &F,
    poly: &[(f64, f64)],
    opts: &LoopOptions,
) -> Result<HolonomyReport> {
    holonomy_with(&Evaluator::new(family), poly, opts)
}

pub(crate) fn holonomy_with<F: FormFamily + ?Sized>(
    eval: &Evaluator<'_, F>,
    poly: &[(f64, f64)],
    opts: &LoopOptions,
) -> Result<HolonomyReport> {
    let floor = opts.gap_floor;
    let reject = move |p: (f64, f64), s: &FamilySample| {
        let gap = s.gap();
        (gap < floor).then(|| Error::GapCollapsedOnLoop { gap, at0: p.0, at1: p.1 })
    };
    let coarse = |a: &FamilySample, b: &FamilySample| {
        a.lower.dot(&b.lower).abs() < MIN_OVERLAP || wrap(angle(b) - angle(a)).abs() >= FRAC_PI_2
    };
    let t = trace(eval, poly, opts, &reject, &coarse)?;
    let start = &t[0].lower;
    let mut v = start.clone();
    for s in &t[1..] {
        let sign = if v.dot(&s.lower) < 0.0 { -1.0 } else { 1.0 };
        v = &s.lower * sign;
    }
    Ok(HolonomyReport {
        sign: if v.dot(start) < 0.0 { -1 } else { 1 },
        min_gap: t.iter().map(|s| s.gap()).fold(f64::INFINITY, f64::min),
        samples: t.len(),
    })
}

use nalgebra::Matrix2;
use rayon::prelude::*;
use serde::Serialize;

use super::certificate::{holonomy_with, winding_with, Evaluator, LoopOptions};
use super::domain::DomainRect;
use super::family::FormFamily;
use crate::error::{Error, Result};
use crate::spectral::format_float;

/// Settings for [`find_degeneracy`].
#[derive(Clone, Copy, Debug)]
pub struct SearchOptions {
    /// Stop once the current rectangle is smaller than this.
    pub tol: f64,
    /// Stop once the gap at the centre is below this.
    pub gap_tol: f64,
    /// Sampling on the outer boundary.
    pub boundary: LoopOptions,
    /// Initial samples per edge on sub-rectangle boundaries.
    pub sub_samples: usize,
    /// Split-line perturbations tried before giving up on a rectangle.
    pub retries: usize,
}

impl SearchOptions {
    /// Defaults for `domain`: guard `1e-6 eta` and gap tolerance `1e-8 eta`
    /// with `eta` the half-width of the `lambda2` range.
    pub fn new(domain: &DomainRect, tol: f64) -> Self {
        let eta = 0.5 * domain.widths().0;
        SearchOptions { tol, gap_tol: 1e-8 * eta, boundary: LoopOptions::for_eta(eta), sub_samples: 16, retries: 5 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Degeneracy {
    pub point: (f64, f64),
    /// `tau / 2` at the point.
    pub double_value: f64,
    pub gap: f64,
    /// Winding number of the outer boundary.
    pub winding: i32,
    /// Last rectangle of the quadrisection.
    pub rect: DomainRect,
    pub depth: usize,
    pub evaluations: usize,
}

const SPLIT_SHIFTS: [f64; 6] = [0.0, 0.1, -0.1, 0.05, -0.05, 0.075];

/// Locates a degenerate form inside `domain` by winding-guided quadrisection.
///
/// Each step splits the rectangle in four, computes the child windings (which
/// must add up to the parent's) and keeps the child with the largest
/// `|winding|`, the lowest index on ties. A guard hit or a failed sum shifts
/// the split lines and retries. The final centre is polished by a few damped
/// Newton steps on `(x, y) = 0` that stay inside the last rectangle.
pub fn find_degeneracy<F: FormFamily + ?Sized>(
    family: &F,
    domain: &DomainRect,
    opts: &SearchOptions,
) -> Result<Degeneracy> {
    let eval = Evaluator::new(family);
    let winding = winding_with(&eval, &domain.boundary(), &opts.boundary)?.winding;
    if winding == 0 {
        return Err(Error::NoCertificate);
    }
    let (mut rect, mut w, mut depth) = (*domain, winding, 0);
    loop {
        let centre = eval.get(rect.center())?;
        if rect.diameter() < opts.tol || centre.gap() < opts.gap_tol {
            break;
        }
        let sub = LoopOptions {
            samples_per_edge: opts.sub_samples,
            guard: opts.boundary.guard * rect.diameter() / domain.diameter(),
            ..opts.boundary
        };
        let mut next = None;
        for shift in SPLIT_SHIFTS.iter().take(opts.retries + 1) {
            let kids = rect.split(0.5 + shift, 0.5 + shift);
            let ws: Result<Vec<i32>> =
                kids.iter().map(|k| Ok(winding_with(&eval, &k.boundary(), &sub)?.winding)).collect();
            match ws {
                Ok(ws) if ws.iter().sum::<i32>() == w => {
                    let best = (0..4).fold(0, |b, i| if ws[i].abs() > ws[b].abs() { i } else { b });
                    next = Some((kids[best], ws[best]));
                    break;
                }
                Ok(_) | Err(Error::GuardViolated(..)) => continue,
                Err(e) => return Err(e),
            }
        }
        let (child, cw) = next.ok_or(Error::BoundaryDegeneracy(opts.retries))?;
        rect = child;
        w = cw;
        depth += 1;
    }
    let point = polish(&eval, &rect)?;
    let s = eval.get(point)?;
    Ok(Degeneracy {
        point,
        double_value: 0.5 * s.form.trace(),
        gap: s.gap(),
        winding,
        rect,
        depth,
        evaluations: eval.evaluations(),
    })
}

fn xy<F: FormFamily + ?Sized>(eval: &Evaluator<'_, F>, p: (f64, f64)) -> Result<[f64; 2]> {
    let s = eval.get(p)?;
    Ok([s.form.x(), s.form.y()])
}

/// Central-difference Jacobian of `(a, b) -> (x, y)`.
fn jacobian<F: FormFamily + ?Sized>(eval: &Evaluator<'_, F>, p: (f64, f64), h: (f64, f64)) -> Result<Matrix2<f64>> {
    let pts = [(p.0 + h.0, p.1), (p.0 - h.0, p.1), (p.0, p.1 + h.1), (p.0, p.1 - h.1)];
    let s = eval.get_many(&pts)?;
    let d = |i: usize, j: usize, hh: f64| -> [f64; 2] {
        [(s[i].form.x() - s[j].form.x()) / (2.0 * hh), (s[i].form.y() - s[j].form.y()) / (2.0 * hh)]
    };
    let (da, db) = (d(0, 1, h.0), d(2, 3, h.1));
    Ok(Matrix2::new(da[0], db[0], da[1], db[1]))
}

fn polish<F: FormFamily + ?Sized>(eval: &Evaluator<'_, F>, rect: &DomainRect) -> Result<(f64, f64)> {
    let mut best = rect.center();
    let mut best_r = eval.get(best)?.form.radius();
    let (wa, wb) = rect.widths();
    let h = (wa * 1e-3, wb * 1e-3);
    for _ in 0..8 {
        if best_r == 0.0 {
            break;
        }
        let j = jacobian(eval, best, h)?;
        let Some(inv) = j.try_inverse() else { break };
        let f = xy(eval, best)?;
        let step = inv * nalgebra::Vector2::new(f[0], f[1]);
        let mut improved = false;
        let mut t = 1.0;
        for _ in 0..4 {
            let cand = (best.0 - t * step[0], best.1 - t * step[1]);
            if rect.contains(cand) {
                let r = eval.get(cand)?.form.radius();
                if r < best_r {
                    best = cand;
                    best_r = r;
                    improved = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if !improved {
            break;
        }
    }
    Ok(best)
}

#[derive(Clone, Debug, Serialize)]
pub struct TransversalityReport {
    /// The boundary winding is nonzero.
    pub weak: bool,
    /// The Jacobian at the point is nonsingular relative to its scale.
    pub strong: bool,
    pub winding: Option<i32>,
    /// Rows `x`, `y`; columns `lambda2`, `theta`.
    pub jacobian: [[f64; 2]; 2],
    pub singular_values: [f64; 2],
}

/// Weak and strong stability of a degenerate point.
///
/// `strong` requires the smaller singular value of the Jacobian to exceed
/// `1e-6` times the larger of `|J|` and the boundary scale
/// `max_corner |(x, y)| / diam(domain)`, so that a vanishing Jacobian is not
/// mistaken for a well-conditioned tiny one.
pub fn transversality_report<F: FormFamily + ?Sized>(
    family: &F,
    domain: &DomainRect,
    point: (f64, f64),
    opts: &LoopOptions,
) -> Result<TransversalityReport> {
    let eval = Evaluator::new(family);
    let winding = winding_with(&eval, &domain.boundary(), opts).ok().map(|w| w.winding);
    let (wa, wb) = domain.widths();
    let j = jacobian(&eval, point, (1e-5 * wa, 1e-5 * wb))?;
    let sv = j.singular_values();
    let (smax, smin) = (sv.max(), sv.min());
    let corners = eval.get_many(&domain.corners())?;
    let j_ref = corners.iter().map(|s| s.form.radius()).fold(0.0, f64::max) / domain.diameter();
    Ok(TransversalityReport {
        weak: winding.is_some_and(|w| w != 0),
        strong: smin > 1e-6 * smax.max(j_ref),
        winding,
        jacobian: [[j[(0, 0)], j[(0, 1)]], [j[(1, 0)], j[(1, 1)]]],
        singular_values: [smax, smin],
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Certificate {
    pub winding: i32,
    pub holonomy: i8,
    pub point: [f64; 2],
    pub double_value: f64,
    pub gap: f64,
    pub weak: bool,
    pub strong: bool,
}

/// Boundary winding, boundary holonomy, degenerate point and its stability.
pub fn certify<F: FormFamily + ?Sized>(family: &F, domain: &DomainRect, opts: &SearchOptions) -> Result<Certificate> {
    let d = find_degeneracy(family, domain, opts)?;
    let holonomy = holonomy_with(&Evaluator::new(family), &domain.boundary(), &opts.boundary)?;
    let t = transversality_report(family, domain, d.point, &opts.boundary)?;
    Ok(Certificate {
        winding: d.winding,
        holonomy: holonomy.sign,
        point: [d.point.0, d.point.1],
        double_value: d.double_value,
        gap: d.gap,
        weak: t.weak,
        strong: t.strong,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct GridRow {
    pub lambda2: f64,
    pub theta: f64,
    pub mu1: f64,
    pub mu2: f64,
    pub x: f64,
    pub y: f64,
}

/// Window eigenvalues and `(x, y)` on an `na x nb` grid covering `domain`,
/// `lambda2` varying slowest.
pub fn diabolo_grid<F: FormFamily + ?Sized>(
    family: &F,
    domain: &DomainRect,
    na: usize,
    nb: usize,
) -> Result<Vec<GridRow>> {
    if na < 2 || nb < 2 {
        return Err(Error::InvalidInput("grid needs at least two points per axis".into()));
    }
    let lin = |(lo, hi): (f64, f64), n: usize, i: usize| lo + (hi - lo) * i as f64 / (n - 1) as f64;
    let pts: Vec<(f64, f64)> =
        (0..na).flat_map(|i| (0..nb).map(move |j| (i, j))).map(|(i, j)| (lin(domain.lambda2, na, i), lin(domain.theta, nb, j))).collect();
    pts.par_iter()
        .map(|&(a, b)| {
            let s = family.evaluate(a, b)?;
            Ok(GridRow { lambda2: a, theta: b, mu1: s.mu[0], mu2: s.mu[1], x: s.form.x(), y: s.form.y() })
        })
        .collect()
}

pub fn grid_csv(rows: &[GridRow]) -> String {
    let mut out = String::from("lambda2,theta,mu1,mu2,x,y\n");
    for r in rows {
        let cols = [r.lambda2, r.theta, r.mu1, r.mu2, r.x, r.y].map(format_float);
        out.push_str(&cols.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diabolo::family::SyntheticFamily;
    use crate::diabolo::form::QuadraticForm2;

    fn conical(a0: f64, b0: f64) -> SyntheticFamily<impl Fn(f64, f64) -> QuadraticForm2 + Sync> {
        SyntheticFamily::new(move |a, b| QuadraticForm2::from_xy(0.5 * (a - a0), 0.3 * (b - b0).sin(), 2.0 + a))
    }

    #[test]
    fn recovers_conical_point() {
        let d = DomainRect { lambda2: (0.0, 1.0), theta: (0.0, std::f64::consts::PI) };
        let f = conical(0.3, 1.1);
        let r = find_degeneracy(&f, &d, &SearchOptions::new(&d, 1e-4)).unwrap();
        assert!((r.point.0 - 0.3).abs() < 1e-4 && (r.point.1 - 1.1).abs() < 1e-4, "{:?}", r.point);
        assert!(r.gap < 1e-8, "{}", r.gap);
        assert!((r.double_value - 1.15).abs() < 1e-6);
    }

    #[test]
    fn empty_domain_has_no_certificate() {
        let d = DomainRect { lambda2: (0.5, 1.0), theta: (0.0, 3.0) };
        let err = find_degeneracy(&conical(0.3, 1.1), &d, &SearchOptions::new(&d, 1e-4)).unwrap_err();
        assert!(matches!(err, Error::NoCertificate));
    }

    #[test]
    fn transversality() {
        let d = DomainRect { lambda2: (-1.0, 1.0), theta: (-1.0, 1.0) };
        let opts = LoopOptions::default();
        let t = transversality_report(&conical(0.0, 0.0), &d, (0.0, 0.0), &opts).unwrap();
        assert!(t.weak && t.strong);
        let cubic = SyntheticFamily::new(|a: f64, b: f64| QuadraticForm2::from_xy(a.powi(3), b.powi(3), 0.0));
        let t = transversality_report(&cubic, &d, (0.0, 0.0), &opts).unwrap();
        assert!(t.weak && !t.strong, "{t:?}");
        let off = DomainRect { lambda2: (0.5, 1.0), theta: (0.5, 1.0) };
        assert!(!transversality_report(&conical(0.0, 0.0), &off, (0.7, 0.7), &opts).unwrap().weak);
    }

    #[test]
    fn grid_layout() {
        let d = DomainRect { lambda2: (0.0, 1.0), theta: (0.0, 1.0) };
        let rows = diabolo_grid(&conical(0.3, 0.3), &d, 3, 2).unwrap();
        assert_eq!(rows.len(), 6);
        assert_eq!((rows[1].lambda2, rows[1].theta), (0.0, 1.0));
        let csv = grid_csv(&rows);
        assert!(csv.starts_with("lambda2,theta,mu1,mu2,x,y\n"));
        assert_eq!(csv.lines().count(), 7);
    }

    #[test]
    fn certificate_fields() {
        let d = DomainRect { lambda2: (0.0, 1.0), theta: (0.0, std::f64::consts::PI) };
        let c = certify(&conical(0.3, 1.1), &d, &SearchOptions::new(&d, 1e-6)).unwrap();
        assert_eq!(c.winding.abs(), 1);
        assert_eq!(c.holonomy, -1);
        assert!(c.weak && c.strong);
    }
}

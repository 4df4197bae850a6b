use std::f64::consts::PI;

use nalgebra::DMatrix;
use proptest::prelude::*;

use hodge_diabolo::complex::{
    betti_by_rank, homothety, laplacian, pullback, volume, Cochain, SimplicialComplex, WeightSystem,
};
use hodge_diabolo::diabolo::{eigenline_holonomy, loop_winding, DomainRect, LoopOptions, QuadraticForm2, SyntheticFamily};
use hodge_diabolo::fixtures;
use hodge_diabolo::gluing::{attach, dumbbell, union_spectrum, AttachmentSpec};
use hodge_diabolo::linalg;
use hodge_diabolo::prescribe::product_complex;
use hodge_diabolo::spectral::{coexact_from_full, coexact_spectrum, full_spectrum, hodge_consistency, subspace_distance};

fn fixture(i: usize) -> SimplicialComplex {
    match i % 6 {
        0 => fixtures::triangle_boundary(),
        1 => fixtures::tetrahedron_boundary(),
        2 => fixtures::octahedron_boundary(),
        3 => fixtures::torus(),
        4 => fixtures::two_triangles(),
        _ => fixtures::complete_graph(5),
    }
}

fn same_multiset(a: &[f64], b: &[f64], tol: f64) -> bool {
    let (mut a, mut b) = (a.to_vec(), b.to_vec());
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    a.len() == b.len() && a.iter().zip(&b).all(|(x, y)| (x - y).abs() <= tol)
}

fn argsort(v: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&i, &j| v[i].total_cmp(&v[j]).then(i.cmp(&j)));
    idx
}

/// A small glued complex: a fixture with one dumbbell on its first edge.
fn glued(seed: u64, eps: f64) -> (SimplicialComplex, WeightSystem) {
    let k = fixtures::octahedron_boundary();
    let w = fixtures::random_weights(&k, seed);
    let g = dumbbell(3, 1, 0.05).unwrap();
    let spec = AttachmentSpec::single(k.simplices(1)[0].clone(), g.sites()[0].clone(), eps).unwrap();
    let out = attach((&k, &w), &[((&g.complex, &g.weights), &spec)]).unwrap();
    (out.complex, out.weights)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn coboundary_squares_to_zero(seed in 0u64..1000, eps in 0.01f64..1.0) {
        let (k, _) = glued(seed, eps);
        for p in 0..k.top_dim() {
            let dd = k.coboundary(p + 1) * k.coboundary(p);
            prop_assert_eq!(dd.amax(), 0.0);
        }
    }

    #[test]
    fn hodge_decomposition(i in 0usize..6, seed in 0u64..1000) {
        let k = fixture(i);
        let w = fixtures::random_weights(&k, seed);
        for p in 0..=k.top_dim() {
            let r = hodge_consistency(&k, &w, p).unwrap();
            prop_assert!(r.passed && r.kernel_dim == r.betti);
        }
    }

    #[test]
    fn homothety_law(i in 0usize..6, seed in 0u64..1000, c in 0.2f64..5.0) {
        let k = fixture(i);
        let n = k.top_dim();
        let w = fixtures::random_weights(&k, seed);
        let s = homothety(&w, c, n).unwrap();
        // exact up to the rounding of the final sum
        let expected = volume(&w) * c.powi(n as i32);
        prop_assert!((volume(&s) - expected).abs() <= 4.0 * f64::EPSILON * expected);
        for p in 0..=n {
            let a = coexact_spectrum(&k, &w, p).unwrap().values;
            let b = coexact_spectrum(&k, &s, p).unwrap().values;
            prop_assert_eq!(a.len(), b.len());
            for (x, y) in a.iter().zip(&b) {
                prop_assert!((y - x / (c * c)).abs() <= 1e-10 * (x / (c * c)));
            }
            let fa = full_spectrum(&k, &w, p).unwrap();
            let fb: Vec<f64> = full_spectrum(&k, &s, p).unwrap().iter().map(|y| y * c * c).collect();
            // order is preserved up to ties
            let (ia, ib) = (argsort(&fa), argsort(&fb));
            for (x, y) in ia.iter().zip(&ib) {
                prop_assert!((fa[*x] - fb[*y]).abs() <= 1e-9 * fa.last().unwrap().max(1.0));
            }
        }
    }

    #[test]
    fn pullback_commutes_with_laplacian(seed in 0u64..1000, p in 0usize..3) {
        let k = fixtures::octahedron_boundary();
        let f = fixtures::octahedron_antipode();
        let raw = fixtures::random_weights(&k, seed);
        // average over the orbit so the antipode preserves the weights
        let arrays = (0..=k.top_dim())
            .map(|d| {
                let action = f.simplex_action(&k, d).unwrap();
                action.iter().enumerate().map(|(i, &(j, _))| 0.5 * (raw.dim(d)[i] + raw.dim(d)[j])).collect()
            })
            .collect();
        let w = WeightSystem::new(&k, arrays).unwrap();
        prop_assert!(f.preserves_weights(&k, &w, 1e-15).unwrap());
        let l = laplacian(&k, &w, p).unwrap();
        let phi = Cochain::new(&k, p, fixtures::random_weights(&k, seed + 1).dim(p).iter().map(|x| x - 1.0).collect::<Vec<_>>().into()).unwrap();
        let lhs = pullback(&k, &f, &l.apply(&phi)).unwrap();
        let rhs = l.apply(&pullback(&k, &f, &phi).unwrap());
        prop_assert!((lhs.values - rhs.values).amax() <= 1e-12 * l.symmetric().amax());
    }

    #[test]
    fn coexact_modes_are_coexact_eigencochains(i in 0usize..6, seed in 0u64..1000) {
        let k = fixture(i);
        let w = fixtures::random_weights(&k, seed);
        for p in 1..=k.top_dim() {
            let spec = coexact_spectrum(&k, &w, p).unwrap();
            let l = laplacian(&k, &w, p).unwrap();
            let down = l.down.clone();
            for j in 0..spec.len() {
                let v = spec.modes.column(j).into_owned();
                // no component along the exact part im(B_(p-1))
                prop_assert!((down.transpose() * &v).norm() <= 1e-9 * v.norm());
                let r = l.symmetric() * &v - &v * spec.values[j];
                prop_assert!(r.norm() <= 1e-9 * spec.values[j].max(1.0) * v.norm());
            }
        }
    }

    #[test]
    fn coexact_recovered_from_full_spectra(i in 0usize..6, seed in 0u64..1000) {
        let k = fixture(i);
        let w = fixtures::random_weights(&k, seed);
        let full: Vec<Vec<f64>> = (0..=k.top_dim()).map(|p| full_spectrum(&k, &w, p).unwrap()).collect();
        let rec = coexact_from_full(&full, &betti_by_rank(&k)).unwrap();
        for p in 0..=k.top_dim() {
            let radius = full[p].last().copied().unwrap_or(1.0).max(1.0);
            prop_assert!(same_multiset(&rec[p], &coexact_spectrum(&k, &w, p).unwrap().values, 1e-9 * radius));
        }
    }

    #[test]
    fn subspace_distance_triangle(
        ambient in 4usize..=20,
        dim in 1usize..=4,
        entries in prop::collection::vec(-1.0f64..1.0, 3 * 20 * 4),
    ) {
        let dim = dim.min(ambient);
        let basis = |k: usize| {
            let m = DMatrix::from_fn(ambient, dim, |r, c| entries[k * 80 + r * 4 + c]);
            linalg::orthonormal_columns(&m)
        };
        let (e, f, g) = (basis(0), basis(1), basis(2));
        prop_assume!(e.ncols() == dim && f.ncols() == dim && g.ncols() == dim);
        let d = |a: &DMatrix<f64>, b: &DMatrix<f64>| subspace_distance(a, b).unwrap().distance;
        prop_assert!(d(&e, &g) <= d(&e, &f) + d(&f, &g) + 1e-10);
    }

    #[test]
    fn decoupled_gluing_is_the_union(seed in 0u64..1000, p in 0usize..2) {
        let k = fixtures::octahedron_boundary();
        let w = fixtures::random_weights(&k, seed);
        let part = fixtures::tetrahedron_boundary();
        let pw = fixtures::random_weights(&part, seed + 7);
        let site = if p == 0 { (vec![0], vec![1]) } else { (vec![0, 2], vec![1, 3]) };
        let spec = AttachmentSpec::new(vec![site], 0.0, vec![1.0]).unwrap();
        let g = attach((&k, &w), &[((&part, &pw), &spec)]).unwrap();
        let glued = coexact_spectrum(&g.complex, &g.weights, p).unwrap().values;
        let union = union_spectrum(&[coexact_spectrum(&k, &w, p).unwrap(), coexact_spectrum(&part, &pw, p).unwrap()]).unwrap();
        prop_assert!(same_multiset(&glued, &union, 1e-12 * union.last().copied().unwrap_or(1.0).max(1.0)));
    }

    #[test]
    fn connector_perturbation_weyl_bound(seed in 0u64..1000, e1 in 0.01f64..1.0, e2 in 0.01f64..1.0, p in 0usize..3) {
        let (k, w1) = glued(seed, e1);
        let (_, w2) = glued(seed, e2);
        let (l1, l2) = (laplacian(&k, &w1, p).unwrap().symmetric(), laplacian(&k, &w2, p).unwrap().symmetric());
        let norm = linalg::singular_values(&(&l1 - &l2)).first().copied().unwrap_or(0.0);
        let (s1, s2) = (linalg::sym_eigenvalues(&l1), linalg::sym_eigenvalues(&l2));
        let scale = l1.amax().max(l2.amax());
        for (a, b) in s1.iter().zip(&s2) {
            prop_assert!((a - b).abs() <= norm + 1e-12 * scale);
        }
    }

    #[test]
    fn quadratic_form_eigenvalues(q11 in -1e3f64..1e3, q12 in -1e3f64..1e3, q22 in -1e3f64..1e3) {
        let q = QuadraticForm2::new(q11, q12, q22);
        let [lo, hi] = q.eigenvalues();
        let direct = linalg::sym_eigenvalues(&DMatrix::from_iterator(2, 2, q.matrix().iter().copied()));
        let scale = q11.abs().max(q12.abs()).max(q22.abs()).max(1.0);
        prop_assert!((lo - direct[0]).abs() <= 1e-14 * scale && (hi - direct[1]).abs() <= 1e-14 * scale);
        prop_assert!((lo - (q.trace() / 2.0 - q.radius())).abs() <= 1e-14 * scale);
    }

    #[test]
    fn winding_is_additive_under_quadrisection(
        a in 0.05f64..0.95, b in 0.05f64..0.95,
        fa in 0.2f64..0.8, fb in 0.2f64..0.8,
        m in prop::array::uniform4(-2.0f64..2.0),
    ) {
        prop_assume!((m[0] * m[3] - m[1] * m[2]).abs() > 0.1);
        let fam = SyntheticFamily::new(move |s: f64, t: f64| {
            let (ds, dt) = (s - a, t - b);
            QuadraticForm2::from_xy(m[0] * ds + m[1] * dt, m[2] * ds + m[3] * dt, 1.0)
        });
        let rect = DomainRect { lambda2: (0.0, 1.0), theta: (0.0, 1.0) };
        let opts = LoopOptions { guard: 1e-9, ..LoopOptions::default() };
        let children = rect.split(fa, fb);
        // keep the cone off every boundary so all windings are defined
        prop_assume!(children.iter().all(|c| {
            let ((a0, a1), (b0, b1)) = (c.lambda2, c.theta);
            (a - a0).abs().min((a - a1).abs()) > 1e-3 || (b - b0).abs().min((b - b1).abs()) > 1e-3
        }));
        prop_assume!((a - (fa)).abs() > 1e-3 && (b - fb).abs() > 1e-3);
        let parent = loop_winding(&fam, &rect.boundary(), &opts).unwrap().winding;
        let sum: i32 = children.iter().map(|c| loop_winding(&fam, &c.boundary(), &opts).unwrap().winding).sum();
        prop_assert_eq!(parent, sum);
        prop_assert_eq!(parent.abs(), 1);
    }

    #[test]
    fn holonomy_matches_winding(
        a in -0.5f64..1.5, b in -0.5f64..1.5,
        m in prop::array::uniform4(-2.0f64..2.0),
        k in 1i32..=2,
    ) {
        prop_assume!((m[0] * m[3] - m[1] * m[2]).abs() > 0.1);
        // (x + i y) = (linear map)^k has a k-fold winding around the point
        let fam = SyntheticFamily::new(move |s: f64, t: f64| {
            let (ds, dt) = (s - a, t - b);
            let (u, v) = (m[0] * ds + m[1] * dt, m[2] * ds + m[3] * dt);
            let (r, phi) = (u.hypot(v), v.atan2(u));
            QuadraticForm2::from_xy(r.powi(k) * (k as f64 * phi).cos(), r.powi(k) * (k as f64 * phi).sin(), 0.0)
        });
        let rect = DomainRect { lambda2: (0.0, 1.0), theta: (0.0, 1.0) };
        prop_assume!((a.abs().min((a - 1.0).abs()) > 0.05) && (b.abs().min((b - 1.0).abs()) > 0.05));
        let opts = LoopOptions { guard: 1e-9, gap_floor: 1e-9, ..LoopOptions::default() };
        let w = loop_winding(&fam, &rect.boundary(), &opts).unwrap().winding;
        let h = eigenline_holonomy(&fam, &rect.boundary(), &opts).unwrap().sign;
        prop_assert_eq!(i32::from(h), if w % 2 == 0 { 1 } else { -1 });
        let inside = (0.0..=1.0).contains(&a) && (0.0..=1.0).contains(&b);
        prop_assert_eq!(w.abs(), if inside { k } else { 0 });
    }

    #[test]
    fn product_eigenvalues_are_sums(s1 in 0u64..1000, s2 in 0u64..1000, i in 0usize..3, j in 0usize..3) {
        let (k1, k2) = (fixture(i), fixture(j + 3));
        let (w1, w2) = (fixtures::random_weights(&k1, s1), fixtures::random_weights(&k2, s2));
        let prod = product_complex(&k1, &w1, &k2, &w2).unwrap();
        prop_assume!(prod.cochain_dim(1) <= 400);
        let f1: Vec<Vec<f64>> = (0..=k1.top_dim()).map(|p| full_spectrum(&k1, &w1, p).unwrap()).collect();
        let f2: Vec<Vec<f64>> = (0..=k2.top_dim()).map(|q| full_spectrum(&k2, &w2, q).unwrap()).collect();
        for r in 0..=1usize {
            let mut sums = Vec::new();
            for p in 0..=r {
                if let (Some(a), Some(b)) = (f1.get(p), f2.get(r - p)) {
                    sums.extend(a.iter().flat_map(|x| b.iter().map(move |y| x + y)));
                }
            }
            let direct = prod.spectrum(r);
            let scale = direct.last().copied().unwrap_or(1.0).max(1.0);
            prop_assert!(same_multiset(&direct, &sums, 1e-10 * scale));
        }
    }
}

#[test]
fn half_turn_is_a_symmetry_of_the_quarter_turn_cone() {
    // the quarter-turn cone x + iy = e^{i theta}(lambda - 1) is mapped to its
    // negative by theta -> theta + pi, which flips no eigenvalue
    let fam = SyntheticFamily::new(|l: f64, t: f64| QuadraticForm2::from_xy((l - 1.0) * t.cos(), (l - 1.0) * t.sin(), 2.0));
    use hodge_diabolo::diabolo::FormFamily;
    for t in [0.0, 0.7, 2.0] {
        let (a, b) = (fam.evaluate(1.3, t).unwrap(), fam.evaluate(1.3, t + PI).unwrap());
        assert!((a.mu[0] - b.mu[0]).abs() < 1e-14 && (a.mu[1] - b.mu[1]).abs() < 1e-14);
    }
}

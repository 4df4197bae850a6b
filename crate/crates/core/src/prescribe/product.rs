use nalgebra::DMatrix;
use serde::Serialize;

use crate::complex::{betti_by_rank, homothety, weighted_coboundary, SimplicialComplex, WeightSystem};
use crate::error::{Error, Result};
use crate::fixtures;
use crate::linalg;
use crate::spectral::{coexact_from_full, coexact_spectrum, full_spectrum, CONSISTENCY_TOL};

/// Graded tensor product of two weighted cochain complexes.
///
/// `C^r` is the direct sum of the blocks `C^p(K1) (x) C^q(K2)` with
/// `p + q = r`, ordered by increasing `p`; within a block the index of
/// `(i, j)` is `i * dim C^q(K2) + j`. Weights are products of factor weights,
/// and the coboundary is `d1 (x) 1 + (-1)^p 1 (x) d2`.
#[derive(Clone, Debug)]
pub struct ProductComplex {
    pub factors: [(SimplicialComplex, WeightSystem); 2],
    /// Weighted coboundaries of each factor, in symmetrised coordinates.
    b: [Vec<DMatrix<f64>>; 2],
}

pub fn product_complex(k1: &SimplicialComplex, w1: &WeightSystem, k2: &SimplicialComplex, w2: &WeightSystem) -> Result<ProductComplex> {
    w1.check(k1)?;
    w2.check(k2)?;
    let cob = |k: &SimplicialComplex, w: &WeightSystem| -> Result<Vec<DMatrix<f64>>> {
        Ok((0..=k.top_dim()).map(|p| weighted_coboundary(k, w, p)).collect())
    };
    Ok(ProductComplex { b: [cob(k1, w1)?, cob(k2, w2)?], factors: [(k1.clone(), w1.clone()), (k2.clone(), w2.clone())] })
}

impl ProductComplex {
    pub fn top_dim(&self) -> usize {
        self.factors[0].0.top_dim() + self.factors[1].0.top_dim()
    }

    fn dim(&self, f: usize, p: usize) -> usize {
        let k = &self.factors[f].0;
        if p <= k.top_dim() {
            k.count(p)
        } else {
            0
        }
    }

    /// `(p, q, offset)` of every block of degree `r`.
    fn blocks(&self, r: usize) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        let mut off = 0;
        for p in 0..=r {
            let q = r - p;
            let size = self.dim(0, p) * self.dim(1, q);
            if size > 0 {
                out.push((p, q, off));
                off += size;
            }
        }
        out
    }

    pub fn cochain_dim(&self, r: usize) -> usize {
        (0..=r).map(|p| self.dim(0, p) * self.dim(1, r - p)).sum()
    }

    /// Weighted coboundary `C^r -> C^(r+1)` in symmetrised coordinates.
    pub fn coboundary(&self, r: usize) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(self.cochain_dim(r + 1), self.cochain_dim(r));
        let target: Vec<(usize, usize, usize)> = self.blocks(r + 1);
        let find = |p: usize, q: usize| target.iter().find(|&&(a, b, _)| a == p && b == q).map(|t| t.2);
        for (p, q, col) in self.blocks(r) {
            let (i1, i2) = (DMatrix::identity(self.dim(0, p), self.dim(0, p)), DMatrix::identity(self.dim(1, q), self.dim(1, q)));
            if let Some(row) = find(p + 1, q) {
                let blk = self.b[0][p].kronecker(&i2);
                out.view_mut((row, col), blk.shape()).copy_from(&blk);
            }
            if let Some(row) = find(p, q + 1) {
                let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
                let blk = i1.kronecker(&self.b[1][q]) * sign;
                out.view_mut((row, col), blk.shape()).copy_from(&blk);
            }
        }
        out
    }

    /// Symmetrised Laplacian of degree `r`.
    pub fn laplacian(&self, r: usize) -> DMatrix<f64> {
        let up = self.coboundary(r);
        let mut l = up.transpose() * &up;
        if r > 0 {
            let down = self.coboundary(r - 1);
            l += &down * down.transpose();
        }
        l
    }

    pub fn spectrum(&self, r: usize) -> Vec<f64> {
        linalg::sym_eigenvalues(&self.laplacian(r))
    }

    /// Coexact spectrum of degree `r`, from `B_r^T B_r`.
    pub fn coexact(&self, r: usize) -> Vec<f64> {
        linalg::gram_pairs(&self.coboundary(r), 1e-11).0
    }

    /// Künneth Betti numbers `sum b_p(K1) b_q(K2)`.
    pub fn betti(&self) -> Vec<usize> {
        let (b1, b2) = (betti_by_rank(&self.factors[0].0), betti_by_rank(&self.factors[1].0));
        (0..=self.top_dim())
            .map(|r| (0..=r).map(|p| b1.get(p).copied().unwrap_or(0) * b2.get(r - p).copied().unwrap_or(0)).sum())
            .collect()
    }
}

/// Degree-`r` full spectrum of a product from factor spectra, and its
/// coexact part.
#[derive(Clone, Debug, Serialize)]
pub struct KunnethSpectrum {
    pub degree: usize,
    pub full: Vec<f64>,
    pub coexact: Vec<f64>,
    pub betti: usize,
}

/// All sums `lambda + mu` with `lambda` in degree `p` of the first factor and
/// `mu` in degree `r - p` of the second, sorted; the coexact part is peeled
/// off degree by degree with the Künneth Betti numbers.
pub fn kunneth_spectrum(full1: &[Vec<f64>], betti1: &[usize], full2: &[Vec<f64>], betti2: &[usize], r: usize) -> Result<KunnethSpectrum> {
    if full1.len() != betti1.len() || full2.len() != betti2.len() {
        return Err(Error::InconsistentSpectra("one Betti number per degree is required".into()));
    }
    for (full, betti) in [(full1, betti1), (full2, betti2)] {
        for (p, (s, &b)) in full.iter().zip(betti).enumerate() {
            let radius = s.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(1.0);
            let zeros = s.iter().filter(|x| x.abs() <= CONSISTENCY_TOL * radius).count();
            if zeros != b {
                return Err(Error::InconsistentSpectra(format!("degree {p}: {zeros} zero eigenvalues but b = {b}")));
            }
        }
    }
    let sums = |r: usize| -> Vec<f64> {
        let mut out = Vec::new();
        for p in 0..=r {
            if let (Some(a), Some(b)) = (full1.get(p), full2.get(r - p)) {
                out.extend(a.iter().flat_map(|x| b.iter().map(move |y| x + y)));
            }
        }
        out.sort_by(f64::total_cmp);
        out
    };
    let betti_r = |r: usize| -> usize {
        (0..=r).map(|p| betti1.get(p).copied().unwrap_or(0) * betti2.get(r - p).copied().unwrap_or(0)).sum()
    };
    let full: Vec<Vec<f64>> = (0..=r).map(sums).collect();
    let betti: Vec<usize> = (0..=r).map(betti_r).collect();
    let coexact = coexact_from_full(&full, &betti)?;
    Ok(KunnethSpectrum { degree: r, full: full[r].clone(), coexact: coexact[r].clone(), betti: betti[r] })
}

/// Verified report of a product with a highly multiple first eigenvalue.
#[derive(Clone, Debug, Serialize)]
pub struct MultiplicityReport {
    pub degree: usize,
    pub k: usize,
    /// First nonzero function eigenvalue of the first factor.
    pub mu01: f64,
    /// First coexact eigenvalue of the first factor in degree one (infinite
    /// when it has none).
    pub mu11: Option<f64>,
    /// Smallest nonzero eigenvalue of the second factor over all degrees.
    pub second_factor_floor: f64,
    pub second_factor_betti: usize,
    /// Lowest coexact eigenvalue of the product in the target degree.
    pub mu1: f64,
    pub multiplicity: usize,
    pub predicted: Vec<f64>,
    /// The first factor is any complex with the spectral features; it is not
    /// required to be a manifold.
    pub note: &'static str,
}

impl MultiplicityReport {
    pub fn holds(&self) -> bool {
        self.multiplicity >= self.k && (self.mu1 - self.mu01).abs() <= 1e-9 * self.mu01 && self.mu11.map_or(true, |m| m > self.mu01)
    }
}

/// `K_(k+1)` with unit weights times the boundary of the `(p+1)`-simplex,
/// scaled so its nonzero spectrum lies above `3 (k + 1)`: the first
/// degree-`p` coexact eigenvalue of the product is `k + 1` with multiplicity
/// at least `k`.
pub fn high_multiplicity_example(p: usize, k: usize) -> Result<(ProductComplex, MultiplicityReport)> {
    if k == 0 || k > 20 {
        return Err(Error::InvalidInput(format!("multiplicity target must be in 1..=20, got {k}")));
    }
    if p == 0 {
        return Err(Error::InvalidInput("degree must be at least 1".into()));
    }
    let n1 = fixtures::complete_graph(k + 1);
    let w1 = WeightSystem::uniform(&n1);
    let mu01 = coexact_spectrum(&n1, &w1, 0)?.values[0];
    let mu11 = if n1.top_dim() >= 1 { coexact_spectrum(&n1, &w1, 1)?.values.first().copied() } else { None };

    let n2 = fixtures::simplex_boundary(p + 1);
    let unit = WeightSystem::uniform(&n2);
    let floor = (0..=n2.top_dim())
        .filter_map(|q| coexact_spectrum(&n2, &unit, q).ok()?.values.first().copied())
        .fold(f64::INFINITY, f64::min);
    let w2 = homothety(&unit, (floor / (3.0 * mu01)).sqrt() * 0.99, n2.top_dim())?;
    let floor2 = (0..=n2.top_dim())
        .filter_map(|q| coexact_spectrum(&n2, &w2, q).ok()?.values.first().copied())
        .fold(f64::INFINITY, f64::min);
    let b2 = betti_by_rank(&n2)[p];

    let prod = product_complex(&n1, &w1, &n2, &w2)?;
    let coex = prod.coexact(p);
    let mu1 = coex[0];
    let multiplicity = coex.iter().filter(|&&x| (x - mu1).abs() <= 1e-9 * mu1.max(1.0)).count();
    let full1: Vec<Vec<f64>> = (0..=n1.top_dim()).map(|q| full_spectrum(&n1, &w1, q)).collect::<Result<_>>()?;
    let full2: Vec<Vec<f64>> = (0..=n2.top_dim()).map(|q| full_spectrum(&n2, &w2, q)).collect::<Result<_>>()?;
    let predicted = kunneth_spectrum(&full1, &betti_by_rank(&n1), &full2, &betti_by_rank(&n2), p)?.coexact;
    let report = MultiplicityReport {
        degree: p,
        k,
        mu01,
        mu11,
        second_factor_floor: floor2,
        second_factor_betti: b2,
        mu1,
        multiplicity,
        predicted: predicted.into_iter().take(multiplicity + 1).collect(),
        note: "first factor is a complete graph, not a manifold",
    };
    Ok((prod, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::betti;

    fn unit(k: &SimplicialComplex) -> WeightSystem {
        WeightSystem::uniform(k)
    }

    #[test]
    fn degree_zero_sums() {
        let tri = fixtures::triangle_boundary();
        let edge = SimplicialComplex::from_facets(&[vec![0, 1]]).unwrap();
        let prod = product_complex(&tri, &unit(&tri), &edge, &unit(&edge)).unwrap();
        let s = prod.spectrum(0);
        for (a, b) in s.iter().zip([0.0, 2.0, 3.0, 3.0, 5.0, 5.0]) {
            assert!((a - b).abs() < 1e-12, "{s:?}");
        }
    }

    #[test]
    fn torus_betti() {
        let tri = fixtures::triangle_boundary();
        let prod = product_complex(&tri, &unit(&tri), &tri, &unit(&tri)).unwrap();
        assert_eq!(prod.betti(), vec![1, 2, 1]);
        let s = prod.spectrum(1);
        let zeros = s.iter().filter(|x| x.abs() < 1e-10).count();
        assert_eq!(zeros, 2);
        assert_eq!(betti(&tri), vec![1, 1]);
    }

    #[test]
    fn coboundary_squares_to_zero() {
        let tet = fixtures::tetrahedron_boundary();
        let tri = fixtures::triangle_boundary();
        let prod = product_complex(&tet, &fixtures::random_weights(&tet, 3), &tri, &fixtures::random_weights(&tri, 4)).unwrap();
        for r in 0..prod.top_dim() {
            let dd = prod.coboundary(r + 1) * prod.coboundary(r);
            assert!(dd.amax() < 1e-12);
        }
    }

    #[test]
    fn tensor_eigenvector() {
        let tri = fixtures::triangle_boundary();
        let k4 = fixtures::complete_graph(4);
        let (w1, w2) = (fixtures::random_weights(&k4, 1), fixtures::random_weights(&tri, 2));
        let prod = product_complex(&k4, &w1, &tri, &w2).unwrap();
        let l1 = crate::complex::laplacian(&k4, &w1, 0).unwrap().symmetric();
        let l2 = crate::complex::laplacian(&tri, &w2, 1).unwrap().symmetric();
        let (e1, v1) = linalg::sym_eigen(&l1);
        let (e2, v2) = linalg::sym_eigen(&l2);
        let u = v1.column(2).kronecker(&v2.column(1));
        // degree 1 = C^0 (x) C^1 followed by C^1 (x) C^0
        let mut x = nalgebra::DVector::zeros(prod.cochain_dim(1));
        x.rows_mut(0, u.len()).copy_from(&u);
        let lx = prod.laplacian(1) * &x;
        assert!((lx - x * (e1[2] + e2[1])).amax() < 1e-12);
    }

    #[test]
    fn kunneth_sums() {
        let full1 = vec![vec![0.0, 3.0, 3.0], vec![0.0, 3.0, 3.0]];
        let full2 = vec![vec![0.0, 2.0], vec![2.0]];
        let r = kunneth_spectrum(&full1, &[1, 1], &full2, &[1, 0], 0).unwrap();
        assert_eq!(r.full, vec![0.0, 2.0, 3.0, 3.0, 5.0, 5.0]);
        assert_eq!(r.coexact, vec![2.0, 3.0, 3.0, 5.0, 5.0]);
        let zeros = kunneth_spectrum(&full1, &[1, 1], &full2, &[1, 0], 1).unwrap();
        assert_eq!(zeros.full.iter().filter(|&&x| x == 0.0).count(), zeros.betti);
        assert!(matches!(kunneth_spectrum(&full1, &[2, 1], &full2, &[1, 0], 0), Err(Error::InconsistentSpectra(_))));
    }

    #[test]
    fn multiplicity_three_and_five() {
        for k in [3, 5] {
            let (prod, r) = high_multiplicity_example(1, k).unwrap();
            assert!(r.holds(), "{r:?}");
            assert!((r.mu1 - (k + 1) as f64).abs() < 1e-9);
            assert!(r.multiplicity >= k);
            assert!(r.predicted.iter().take(k).all(|x| (x - r.mu1).abs() < 1e-9));
            assert_eq!(prod.betti()[1], r.second_factor_betti + (k * (k + 1) / 2 - k));
        }
        let (_, r1) = high_multiplicity_example(1, 1).unwrap();
        assert!(r1.multiplicity >= 1);
    }

    #[test]
    fn low_second_factor_breaks_gap() {
        // unscaled triangle: its nonzero spectrum (3) sits below K4's 4
        let k4 = fixtures::complete_graph(4);
        let tri = fixtures::triangle_boundary();
        let prod = product_complex(&k4, &unit(&k4), &tri, &unit(&tri)).unwrap();
        assert!((prod.coexact(1)[0] - 4.0).abs() > 1e-6);
    }
}

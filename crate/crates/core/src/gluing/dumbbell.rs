use serde::Serialize;

use crate::complex::{
    homothety, pullback, volume, Cochain, SimplicialComplex, SimplicialMap, WeightSystem,
};
use crate::error::{Error, Result};
use crate::spectral::{coexact_spectrum, CoexactSpectrum};

/// `(n, p)` pairs with a dumbbell construction.
pub const SUPPORTED: [(usize, usize); 4] = [(2, 0), (3, 0), (3, 1), (4, 1)];

/// Largest admissible neck parameter.
pub const U_MAX: f64 = 0.5;

/// Latitude rings and ring size of the degree-one shell.
const RINGS: usize = 3;
pub const RING_SIZE: usize = 8;

/// A complex with one small coexact eigenvalue in degree `p`, controlled by
/// `u`, and an involution that reverses the small mode.
#[derive(Clone, Debug)]
pub struct DumbbellGadget {
    pub n: usize,
    pub p: usize,
    pub u: f64,
    pub complex: SimplicialComplex,
    pub weights: WeightSystem,
    pub involution: SimplicialMap,
    /// Vertex fixed by the involution, where handles attach.
    pub hub: usize,
    /// Even-length cyclic vertex list, mapped onto itself by a half-turn.
    pub ring: Vec<usize>,
    /// Lower bound for the second degree-`p` eigenvalue and for the first
    /// eigenvalue in the other tested degrees, valid for `0 < u <= U_MAX`.
    pub floor: f64,
    /// Upper bound for the volume.
    pub volume_bound: f64,
}

/// Builds the gadget for dimension `n`, degree `p`, neck parameter `u`.
///
/// Degree 0: two tetrahedron boundaries joined through a hub vertex by two
/// edges of weight `u^(n-1)`, the hub itself carrying mass `u^(n-1)`; the
/// involution swaps the lobes.
///
/// Degree 1: a triangulated sphere with poles, three latitude rings of eight
/// vertices, and two opposite meridians whose edges carry weight
/// `u^-(n-p-1)`. Those meridians form a cycle with a small coexact mode. The
/// involution is the half-turn of the rings, which swaps the two meridians and
/// so reverses the cycle. The ring around the north pole (the hub) is the
/// attachment ring.
pub fn dumbbell(n: usize, p: usize, u: f64) -> Result<DumbbellGadget> {
    if !SUPPORTED.contains(&(n, p)) {
        return Err(Error::UnsupportedDegree { n, p });
    }
    if !(u > 0.0 && u <= U_MAX) {
        return Err(Error::InvalidInput(format!("neck parameter u = {u} outside (0, {U_MAX}]")));
    }
    match p {
        0 => Ok(two_lobes(n, u)),
        _ => Ok(meridian_sphere(n, p, u)),
    }
}

fn two_lobes(n: usize, u: f64) -> DumbbellGadget {
    let lobe = |a: usize| -> Vec<Vec<usize>> {
        (0..4).map(|skip| (0..4).filter(|&v| v != skip).map(|v| a + v).collect()).collect()
    };
    let mut facets = lobe(1);
    facets.extend(lobe(5));
    facets.push(vec![0, 1]);
    facets.push(vec![0, 5]);
    let complex = SimplicialComplex::from_facets(&facets).expect("valid gadget");
    let mut w: Vec<Vec<f64>> = complex.counts().into_iter().map(|c| vec![1.0; c]).collect();
    let neck = u.powi(n as i32 - 1);
    for e in [[0, 1], [0, 5]] {
        w[1][complex.index_of(&e).expect("neck edge")] = neck;
    }
    // the hub belongs to the neck: small mass keeps its own mode high
    w[0][0] = neck;
    let weights = WeightSystem::new(&complex, w).expect("positive weights");
    let involution = SimplicialMap::swaps(&[(1, 5), (2, 6), (3, 7), (4, 8)]);
    DumbbellGadget {
        n,
        p: 0,
        u,
        volume_bound: complex.count(0) as f64 + 1.0,
        complex,
        weights,
        involution,
        hub: 0,
        ring: vec![1, 5],
        floor: 1.5,
    }
}

fn meridian_sphere(n: usize, p: usize, u: f64) -> DumbbellGadget {
    let m = RING_SIZE;
    let v = |i: usize, j: usize| 1 + (i - 1) * m + (j % m);
    let south = 1 + RINGS * m;
    let mut facets = Vec::new();
    for j in 0..m {
        facets.push(vec![0, v(1, j), v(1, j + 1)]);
        for i in 1..RINGS {
            facets.push(vec![v(i, j), v(i, j + 1), v(i + 1, j + 1)]);
            facets.push(vec![v(i, j), v(i + 1, j), v(i + 1, j + 1)]);
        }
        facets.push(vec![v(RINGS, j), v(RINGS, j + 1), south]);
    }
    let complex = SimplicialComplex::from_facets(&facets).expect("valid gadget");
    let mut w: Vec<Vec<f64>> = complex.counts().into_iter().map(|c| vec![1.0; c]).collect();
    let core = u.powi(-((n - p - 1) as i32));
    for j in [0, m / 2] {
        let path: Vec<usize> =
            std::iter::once(0).chain((1..=RINGS).map(|i| v(i, j))).chain(std::iter::once(south)).collect();
        for e in path.windows(2) {
            let mut e = e.to_vec();
            e.sort_unstable();
            w[1][complex.index_of(&e).expect("meridian edge")] = core;
        }
    }
    let weights = WeightSystem::new(&complex, w).expect("positive weights");
    let involution = SimplicialMap::from_pairs(
        (1..=RINGS).flat_map(|i| (0..m).map(move |j| (v(i, j), v(i, j + m / 2)))),
    );
    DumbbellGadget {
        n,
        p,
        u,
        volume_bound: complex.count(0) as f64 + 1.0,
        complex,
        weights,
        involution,
        hub: 0,
        ring: (0..m).map(|j| v(1, j)).collect(),
        floor: 0.2,
    }
}

impl DumbbellGadget {
    /// Attachment sites in degree `p`: the ring vertices for `p = 0`, the
    /// spokes `(hub, r)` otherwise, in ring order and with the hub first.
    pub fn sites(&self) -> Vec<Vec<usize>> {
        match self.p {
            0 => self.ring.iter().map(|&r| vec![r]).collect(),
            _ => self.ring.iter().map(|&r| vec![self.hub, r]).collect(),
        }
    }

    pub fn coexact(&self, q: usize) -> Result<CoexactSpectrum> {
        coexact_spectrum(&self.complex, &self.weights, q)
    }

    /// Degrees other than `p` whose first coexact eigenvalue is bounded below.
    pub fn other_degrees(&self) -> Vec<usize> {
        (0..=(self.n - 1) / 2).filter(|&q| q != self.p && q < self.complex.top_dim()).collect()
    }

    pub fn volume(&self) -> f64 {
        volume(&self.weights)
    }

    /// Weights rescaled by the homothety of ratio `c`, for the gadget's `n`.
    pub fn scaled_weights(&self, c: f64) -> Result<WeightSystem> {
        homothety(&self.weights, c, self.n)
    }

    /// Checks the posted contract at this `u`.
    pub fn contract(&self) -> Result<DumbbellReport> {
        let spec = self.coexact(self.p)?;
        let mu1 = spec.values[0];
        let mu2 = spec.values[1];
        let others: Vec<(usize, f64)> = self
            .other_degrees()
            .into_iter()
            .map(|q| Ok((q, self.coexact(q)?.values.first().copied().unwrap_or(f64::INFINITY))))
            .collect::<Result<_>>()?;
        let omega = spec.cochain(0, &self.weights);
        let ratio = symmetry_ratio(&self.complex, &self.weights, &self.involution, &omega)?;
        Ok(DumbbellReport {
            n: self.n,
            p: self.p,
            u: self.u,
            mu1,
            mu2,
            others,
            floor: self.floor,
            volume: self.volume(),
            volume_bound: self.volume_bound,
            symmetry_ratio: ratio,
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DumbbellReport {
    pub n: usize,
    pub p: usize,
    pub u: f64,
    pub mu1: f64,
    pub mu2: f64,
    pub others: Vec<(usize, f64)>,
    pub floor: f64,
    pub volume: f64,
    pub volume_bound: f64,
    pub symmetry_ratio: f64,
}

impl DumbbellReport {
    /// Floor, volume and oddness checks (decay is checked across several `u`).
    pub fn holds(&self) -> bool {
        self.mu2 >= self.floor
            && self.others.iter().all(|&(_, m)| m >= self.floor)
            && self.volume <= self.volume_bound
            && (self.symmetry_ratio + 1.0).abs() <= 1e-8
    }
}

/// `<f* phi, phi> / <phi, phi>` in the weighted inner product.
pub fn symmetry_ratio(
    k: &SimplicialComplex,
    w: &WeightSystem,
    f: &SimplicialMap,
    phi: &Cochain,
) -> Result<f64> {
    let image = pullback(k, f, phi)?;
    Ok(image.inner(phi, w) / phi.inner(phi, w))
}

/// Sign of `<Y* phi, phi>` for an eigencochain whose eigenvalue `values[index]`
/// must be separated from its neighbours by at least `1e-8`.
pub fn check_odd_symmetry(gadget: &DumbbellGadget, values: &[f64], index: usize, phi: &Cochain) -> Result<i8> {
    let mu = values[index];
    let below = index.checked_sub(1).map_or(f64::INFINITY, |i| mu - values[i]);
    let above = values.get(index + 1).map_or(f64::INFINITY, |x| x - mu);
    let gap = below.min(above);
    if gap < 1e-8 {
        return Err(Error::EigenvalueNotSimple { gap });
    }
    let r = symmetry_ratio(&gadget.complex, &gadget.weights, &gadget.involution, phi)?;
    Ok(if r < 0.0 { -1 } else { 1 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::full_spectrum;

    #[test]
    fn shell_shape() {
        let g = dumbbell(3, 1, 1e-2).unwrap();
        assert_eq!(g.complex.counts(), vec![26, 72, 48]);
        g.involution.check(&g.complex).unwrap();
        assert!(g.involution.preserves_weights(&g.complex, &g.weights, 0.0).unwrap());
        assert_eq!(g.involution.vertex(g.hub), g.hub);
        assert_eq!(g.ring.len() % 2, 0);
        assert_eq!(g.sites()[0], vec![0, 1]);
    }

    #[test]
    fn degree_one_contract() {
        let a = dumbbell(3, 1, 1e-2).unwrap().contract().unwrap();
        let b = dumbbell(3, 1, 1e-3).unwrap().contract().unwrap();
        assert!(b.mu1 / a.mu1 < 0.3);
        assert!(b.mu2 / a.mu2 < 2.0 && a.mu2 / b.mu2 < 2.0);
        assert!(a.holds() && b.holds(), "{a:?} {b:?}");
    }

    #[test]
    fn degree_zero_lumped_model() {
        let a = dumbbell(2, 0, 1e-2).unwrap();
        let b = dumbbell(2, 0, 1e-3).unwrap();
        let (ma, mb) = (a.coexact(0).unwrap().values[0], b.coexact(0).unwrap().values[0]);
        assert!(mb / ma < 0.2);
        // two series edges of conductance u between lobes of mass 4
        let lumped = 1e-3 / 2.0 * (1.0 / 4.0 + 1.0 / 4.0);
        assert!((mb - lumped).abs() < 0.2 * lumped, "{mb} vs {lumped}");
        assert!(a.contract().unwrap().holds());
    }

    #[test]
    fn constant_function_is_even() {
        let g = dumbbell(2, 0, 0.1).unwrap();
        let values = full_spectrum(&g.complex, &g.weights, 0).unwrap();
        let one = Cochain::new(&g.complex, 0, nalgebra::DVector::from_element(9, 1.0)).unwrap();
        assert_eq!(check_odd_symmetry(&g, &values, 0, &one).unwrap(), 1);
    }

    #[test]
    fn repeated_eigenvalue_rejected() {
        let g = dumbbell(2, 0, 0.1).unwrap();
        let phi = Cochain::zeros(&g.complex, 0);
        let err = check_odd_symmetry(&g, &[1.0, 1.0, 2.0], 1, &phi).unwrap_err();
        assert!(matches!(err, Error::EigenvalueNotSimple { .. }));
    }

    #[test]
    fn unsupported_degree() {
        assert!(matches!(dumbbell(3, 2, 0.1), Err(Error::UnsupportedDegree { n: 3, p: 2 })));
        assert!(dumbbell(3, 1, 0.0).is_err());
    }
}

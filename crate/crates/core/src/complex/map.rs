use std::collections::HashMap;

use super::{sort_with_sign, Cochain, SimplicialComplex, WeightSystem};
use crate::error::{Error, Result};

/// A simplicial self-map given by its action on vertex labels.
///
/// Vertices absent from the table are fixed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplicialMap {
    vertices: HashMap<usize, usize>,
}

impl SimplicialMap {
    pub fn identity() -> Self {
        SimplicialMap { vertices: HashMap::new() }
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        SimplicialMap { vertices: pairs.into_iter().filter(|(a, b)| a != b).collect() }
    }

    /// Involution swapping each listed pair.
    pub fn swaps(pairs: &[(usize, usize)]) -> Self {
        SimplicialMap::from_pairs(pairs.iter().flat_map(|&(a, b)| [(a, b), (b, a)]))
    }

    pub fn vertex(&self, v: usize) -> usize {
        self.vertices.get(&v).copied().unwrap_or(v)
    }

    pub fn compose(&self, then: &SimplicialMap) -> SimplicialMap {
        let keys: Vec<usize> =
            self.vertices.keys().chain(then.vertices.keys()).copied().collect();
        SimplicialMap::from_pairs(keys.into_iter().map(|v| (v, then.vertex(self.vertex(v)))))
    }

    /// Index and orientation sign of the image of every `dim`-simplex.
    ///
    /// Fails unless the map permutes the `dim`-simplices of `k`.
    pub fn simplex_action(&self, k: &SimplicialComplex, dim: usize) -> Result<Vec<(usize, i8)>> {
        let mut hit = vec![false; k.count(dim)];
        let mut out = Vec::with_capacity(k.count(dim));
        for s in k.simplices(dim) {
            let image: Vec<usize> = s.iter().map(|&v| self.vertex(v)).collect();
            let (sorted, sign) = sort_with_sign(&image).ok_or_else(|| {
                Error::NotSimplicialMap(format!("{s:?} collapses to {image:?}"))
            })?;
            let j = k.index_of(&sorted).ok_or_else(|| {
                Error::NotSimplicialMap(format!("image {sorted:?} of {s:?} is not a simplex"))
            })?;
            if std::mem::replace(&mut hit[j], true) {
                return Err(Error::NotSimplicialMap(format!("{sorted:?} is hit twice")));
            }
            out.push((j, sign));
        }
        Ok(out)
    }

    /// Checks that the map is an automorphism of `k` in every dimension.
    pub fn check(&self, k: &SimplicialComplex) -> Result<()> {
        for dim in 0..=k.top_dim() {
            self.simplex_action(k, dim)?;
        }
        Ok(())
    }

    pub fn preserves_weights(&self, k: &SimplicialComplex, w: &WeightSystem, tol: f64) -> Result<bool> {
        for dim in 0..=k.top_dim() {
            let action = self.simplex_action(k, dim)?;
            let ws = w.dim(dim);
            if action.iter().enumerate().any(|(i, &(j, _))| (ws[i] - ws[j]).abs() > tol * ws[i].abs()) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// `(f* phi)(s) = sign(f, s) phi(f(s))`.
pub fn pullback(k: &SimplicialComplex, f: &SimplicialMap, phi: &Cochain) -> Result<Cochain> {
    if phi.values.len() != k.count(phi.degree) {
        return Err(Error::CochainLength {
            degree: phi.degree,
            got: phi.values.len(),
            expected: k.count(phi.degree),
        });
    }
    let action = f.simplex_action(k, phi.degree)?;
    let mut out = Cochain::zeros(k, phi.degree);
    for (i, &(j, sign)) in action.iter().enumerate() {
        out.values[i] = f64::from(sign) * phi.values[j];
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use nalgebra::DVector;

    use super::*;
    use crate::complex::laplacian;
    use crate::fixtures;

    #[test]
    fn identity_pullback() {
        let k = fixtures::triangle_boundary();
        let phi = Cochain::new(&k, 1, DVector::from_vec(vec![1.0, 2.0, 3.0])).unwrap();
        assert_eq!(pullback(&k, &SimplicialMap::identity(), &phi).unwrap(), phi);
    }

    #[test]
    fn swap_flips_orientation() {
        // edges in order [0,1], [0,2], [1,2]; swapping 0 and 1 reverses [0,1]
        let k = fixtures::triangle_boundary();
        let phi = Cochain::new(&k, 1, DVector::from_vec(vec![1.0, 2.0, 3.0])).unwrap();
        let out = pullback(&k, &SimplicialMap::swaps(&[(0, 1)]), &phi).unwrap();
        assert_eq!(out.values.as_slice(), &[-1.0, 3.0, 2.0]);
    }

    #[test]
    fn octahedron_antipode_is_involution() {
        let k = fixtures::octahedron_boundary();
        let f = fixtures::octahedron_antipode();
        for p in 0..=2 {
            let phi = Cochain::new(
                &k,
                p,
                DVector::from_fn(k.count(p), |i, _| (i as f64 * 0.7).sin()),
            )
            .unwrap();
            let twice = pullback(&k, &f, &pullback(&k, &f, &phi).unwrap()).unwrap();
            assert!((twice.values - &phi.values).amax() < 1e-15);
        }
    }

    #[test]
    fn pullback_commutes_with_laplacian() {
        let k = fixtures::octahedron_boundary();
        let f = fixtures::octahedron_antipode();
        let w = WeightSystem::uniform(&k);
        for p in 0..=2 {
            let l = laplacian(&k, &w, p).unwrap();
            let phi = Cochain::new(&k, p, DVector::from_fn(k.count(p), |i, _| (i as f64).cos())).unwrap();
            let a = pullback(&k, &f, &l.apply(&phi)).unwrap();
            let b = l.apply(&pullback(&k, &f, &phi).unwrap());
            assert!((a.values - b.values).amax() < 1e-12);
        }
    }

    #[test]
    fn non_simplicial_map_rejected() {
        let k = fixtures::triangle_boundary();
        let collapse = SimplicialMap::from_pairs([(0, 1)]);
        assert!(matches!(collapse.check(&k), Err(Error::NotSimplicialMap(_))));
    }
}

//! Small named complexes used throughout the tests and examples.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::complex::{homothety, SimplicialComplex, SimplicialMap, WeightSystem};

fn build(facets: &[Vec<usize>]) -> SimplicialComplex {
    SimplicialComplex::from_facets(facets).expect("fixture is a valid complex")
}

/// Boundary of a triangle: a circle with 3 vertices and 3 edges.
pub fn triangle_boundary() -> SimplicialComplex {
    build(&[vec![0, 1], vec![1, 2], vec![0, 2]])
}

/// Boundary of the standard `k`-simplex on vertices `0..=k`.
pub fn simplex_boundary(k: usize) -> SimplicialComplex {
    let facets: Vec<Vec<usize>> =
        (0..=k).map(|skip| (0..=k).filter(|&v| v != skip).collect()).collect();
    build(&facets)
}

pub fn tetrahedron_boundary() -> SimplicialComplex {
    simplex_boundary(3)
}

/// Octahedron boundary on antipodal pairs `(0,1)`, `(2,3)`, `(4,5)`.
pub fn octahedron_boundary() -> SimplicialComplex {
    let mut facets = Vec::new();
    for a in [0, 1] {
        for b in [2, 3] {
            for c in [4, 5] {
                facets.push(vec![a, b, c]);
            }
        }
    }
    build(&facets)
}

pub fn octahedron_antipode() -> SimplicialMap {
    SimplicialMap::swaps(&[(0, 1), (2, 3), (4, 5)])
}

/// The 7-vertex torus.
pub fn torus() -> SimplicialComplex {
    let facets: Vec<Vec<usize>> = (0..7)
        .flat_map(|i| [vec![i, (i + 1) % 7, (i + 3) % 7], vec![i, (i + 2) % 7, (i + 3) % 7]])
        .collect();
    build(&facets)
}

/// Two disjoint triangle boundaries on vertices `0..3` and `3..6`.
pub fn two_triangles() -> SimplicialComplex {
    build(&[vec![0, 1], vec![1, 2], vec![0, 2], vec![3, 4], vec![4, 5], vec![3, 5]])
}

/// One-skeleton of the complete graph on `n` vertices.
pub fn complete_graph(n: usize) -> SimplicialComplex {
    let mut facets = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            facets.push(vec![a, b]);
        }
    }
    if facets.is_empty() {
        facets = (0..n).map(|v| vec![v]).collect();
    }
    build(&facets)
}

/// Octahedron with weights scaled so its smallest degree-one coexact
/// eigenvalue is 25: the default base of the diabolo family.
pub fn diabolo_base() -> (SimplicialComplex, WeightSystem) {
    let k = octahedron_boundary();
    let w = homothety(&WeightSystem::uniform(&k), (2.0f64 / 25.0).sqrt(), 3).expect("positive factor");
    (k, w)
}

/// Weights drawn uniformly from `[0.5, 2)` with a fixed seed.
pub fn random_weights(k: &SimplicialComplex, seed: u64) -> WeightSystem {
    let mut rng = StdRng::seed_from_u64(seed);
    let arrays = k.counts().into_iter().map(|n| (0..n).map(|_| rng.gen_range(0.5..2.0)).collect()).collect();
    WeightSystem::new(k, arrays).expect("positive weights")
}

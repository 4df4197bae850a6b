//! Weighted simplicial cochain complexes.

mod io;
mod laplacian;
mod map;
mod simplicial;
mod weights;

pub use io::{complex_to_json, parse_complex, read_complex, ComplexFile};
pub use laplacian::{betti, betti_by_rank, kernel_dim, laplacian, weighted_coboundary, HodgeOperator, KERNEL_TOL};
pub use map::{pullback, SimplicialMap};
pub use simplicial::{face_without, sort_with_sign, Simplex, SimplicialComplex};
pub use weights::{homothety, volume, Cochain, WeightSystem};

//! Prescribing the low coexact spectrum with multiplicities at most two, and
//! tensor products with highly multiple first eigenvalue.

mod product;
mod solve;
mod targets;

pub use product::{high_multiplicity_example, kunneth_spectrum, product_complex, KunnethSpectrum, MultiplicityReport, ProductComplex};
pub use solve::{prescribe_spectrum, PairReport, Prescription, PrescriptionReport, MAX_ITERATIONS};
pub use targets::{TargetGroup, TargetSpectrum};

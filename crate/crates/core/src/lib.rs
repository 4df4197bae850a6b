//! Coexact Hodge spectra on weighted simplicial complexes.
//!
//! The crate builds weighted cochain complexes, computes the spectra of their
//! Hodge Laplacians split into exact and coexact parts, glues complexes
//! through thin weighted connectors, detects conical eigenvalue crossings in
//! two-parameter families by a winding certificate, and assembles complexes
//! with a prescribed low coexact spectrum.

pub mod cli;
pub mod complex;
pub mod diabolo;
pub mod error;
pub mod fixtures;
pub mod gluing;
pub mod linalg;
pub mod prescribe;
pub mod spectral;

pub use error::{Error, Result};

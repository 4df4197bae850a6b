use nalgebra::{DMatrix, DVector};

use super::{Cochain, SimplicialComplex, WeightSystem};
use crate::error::{Error, Result};
use crate::linalg;

/// Relative cutoff (against the spectral radius) below which an eigenvalue of a
/// Laplacian counts as zero.
pub const KERNEL_TOL: f64 = 1e-10;

/// Weighted coboundary in the symmetrised frame,
/// `B_p = W_{p+1}^{1/2} d_p W_p^{-1/2}`.
///
/// The up-Laplacian is `B_p^T B_p` and the down-Laplacian is
/// `B_{p-1} B_{p-1}^T`.
pub fn weighted_coboundary(k: &SimplicialComplex, w: &WeightSystem, p: usize) -> DMatrix<f64> {
    let mut b = k.coboundary(p);
    if b.nrows() == 0 {
        return b;
    }
    linalg::scale_rows(&mut b, &w.sqrt(p + 1));
    let inv = w.sqrt(p).map(|x| 1.0 / x);
    linalg::scale_cols(&mut b, &inv);
    b
}

/// The Hodge Laplacian on `p`-cochains, stored in symmetrised form
/// `S_p = W_p^{1/2} L_p W_p^{-1/2}` and split into its up and down parts.
#[derive(Clone, Debug)]
pub struct HodgeOperator {
    pub degree: usize,
    pub up: DMatrix<f64>,
    pub down: DMatrix<f64>,
    sqrt_w: DVector<f64>,
}

impl HodgeOperator {
    pub fn symmetric(&self) -> DMatrix<f64> {
        &self.up + &self.down
    }

    /// Full spectrum, ascending.
    pub fn spectrum(&self) -> Vec<f64> {
        linalg::sym_eigenvalues(&self.symmetric())
    }

    /// `L_p phi`, in cochain coordinates.
    pub fn apply(&self, phi: &Cochain) -> Cochain {
        let v = phi.values.component_mul(&self.sqrt_w);
        let sv = self.symmetric() * v;
        Cochain { degree: self.degree, values: sv.component_div(&self.sqrt_w) }
    }

    pub fn dim(&self) -> usize {
        self.up.nrows()
    }
}

pub fn laplacian(k: &SimplicialComplex, w: &WeightSystem, p: usize) -> Result<HodgeOperator> {
    if p > k.top_dim() {
        return Err(Error::DegreeOutOfRange { degree: p, max: k.top_dim() });
    }
    w.check(k)?;
    let n = k.count(p);
    let up = {
        let b = weighted_coboundary(k, w, p);
        if b.nrows() == 0 {
            DMatrix::zeros(n, n)
        } else {
            b.transpose() * b
        }
    };
    let down = if p == 0 {
        DMatrix::zeros(n, n)
    } else {
        let b = weighted_coboundary(k, w, p - 1);
        &b * b.transpose()
    };
    Ok(HodgeOperator { degree: p, up, down, sqrt_w: w.sqrt(p) })
}

/// Number of eigenvalues that are zero relative to the spectral radius.
pub fn kernel_dim(spectrum: &[f64]) -> usize {
    let radius = spectrum.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let cut = KERNEL_TOL * radius;
    spectrum.iter().filter(|x| x.abs() <= cut).count()
}

/// Betti numbers as kernel dimensions of the unit-weight Laplacians.
pub fn betti(k: &SimplicialComplex) -> Vec<usize> {
    let w = WeightSystem::uniform(k);
    (0..=k.top_dim())
        .map(|p| kernel_dim(&laplacian(k, &w, p).expect("degree in range").spectrum()))
        .collect()
}

/// Betti numbers from incidence ranks, `b_p = n_p - rank d_p - rank d_{p-1}`.
///
/// Independent of any eigensolve; used to cross-check [`betti`].
pub fn betti_by_rank(k: &SimplicialComplex) -> Vec<usize> {
    let ranks: Vec<usize> =
        (0..=k.top_dim()).map(|p| linalg::rank(&k.coboundary(p), 1e-10)).collect();
    (0..=k.top_dim())
        .map(|p| k.count(p) - ranks[p] - if p > 0 { ranks[p - 1] } else { 0 })
        .collect()
}

//! Small dense linear-algebra helpers.
//!
//! Decompositions go through `faer`; storage and arithmetic stay in nalgebra.

use faer::{Mat, MatRef, Side};
use nalgebra::{DMatrix, DVector};

fn to_faer(m: &DMatrix<f64>) -> Mat<f64> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

fn from_faer(m: MatRef<'_, f64>, cols: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(m.nrows(), cols.len(), |i, j| m.read(i, cols[j]))
}

fn symmetrized(m: &DMatrix<f64>) -> Mat<f64> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| 0.5 * (m[(i, j)] + m[(j, i)]))
}

/// Eigen-decomposition of a symmetric matrix with eigenvalues ascending and
/// eigenvectors as matching columns.
pub fn sym_eigen(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), DMatrix::zeros(0, 0));
    }
    let eig = symmetrized(m).selfadjoint_eigendecomposition(Side::Lower);
    let s = eig.s().column_vector();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| s.read(a).total_cmp(&s.read(b)));
    let values = order.iter().map(|&i| s.read(i)).collect();
    (values, from_faer(eig.u(), &order))
}

pub fn sym_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let mut v = symmetrized(m).selfadjoint_eigenvalues(Side::Lower);
    v.sort_by(f64::total_cmp);
    v
}

/// Nonzero part of the spectrum of `m^T m` with eigenvectors as columns,
/// ascending.
///
/// Eigenvalues below `rel_cut` times the largest are dropped. The returned
/// values are the Rayleigh quotients `|m v|^2`, which keep full relative
/// accuracy for small values.
pub fn gram_pairs(m: &DMatrix<f64>, rel_cut: f64) -> (Vec<f64>, DMatrix<f64>) {
    let cols = m.ncols();
    if cols == 0 || m.nrows() == 0 {
        return (Vec::new(), DMatrix::zeros(cols, 0));
    }
    let (values, vectors) = sym_eigen(&(m.transpose() * m));
    let top = values.last().copied().unwrap_or(0.0);
    let keep: Vec<usize> = (0..cols).filter(|&i| values[i] > rel_cut * top).collect();
    let modes = DMatrix::from_fn(cols, keep.len(), |r, c| vectors[(r, keep[c])]);
    let rq = (0..keep.len()).map(|c| (m * modes.column(c)).norm_squared()).collect();
    (rq, modes)
}

pub fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut s = to_faer(m).singular_values();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Numerical rank with a relative singular-value cutoff.
pub fn rank(m: &DMatrix<f64>, rel_tol: f64) -> usize {
    let s = singular_values(m);
    let Some(&top) = s.first() else { return 0 };
    if top == 0.0 {
        return 0;
    }
    s.iter().filter(|&&x| x > rel_tol * top).count()
}

/// Orthonormal basis of the column span; directions with relative singular
/// value below `1e-10` are dropped.
pub fn orthonormal_columns(m: &DMatrix<f64>) -> DMatrix<f64> {
    let (rows, cols) = m.shape();
    if cols == 0 || rows == 0 {
        return DMatrix::zeros(rows, 0);
    }
    let (values, vectors) = gram_pairs(m, 1e-20);
    let mut q = m * vectors;
    for (j, v) in values.iter().enumerate() {
        q.column_mut(j).scale_mut(1.0 / v.sqrt());
    }
    // one re-orthogonalisation pass against rounding
    let qr = q.qr();
    qr.q()
}

/// `diag(d) * m`, in place.
pub fn scale_rows(m: &mut DMatrix<f64>, d: &DVector<f64>) {
    for (r, mut row) in m.row_iter_mut().enumerate() {
        row *= d[r];
    }
}

/// `m * diag(d)`, in place.
pub fn scale_cols(m: &mut DMatrix<f64>, d: &DVector<f64>) {
    for (c, mut col) in m.column_iter_mut().enumerate() {
        col *= d[c];
    }
}

/// Orthogonal polar factor of a square matrix, the orthogonal matrix closest
/// to `m` in Frobenius norm, together with the smallest singular value of `m`.
pub fn polar_factor(m: &DMatrix<f64>) -> (DMatrix<f64>, f64) {
    let (values, v) = sym_eigen(&(m.transpose() * m));
    let smin = values.first().copied().unwrap_or(0.0).max(0.0).sqrt();
    let inv_sqrt = DVector::from_iterator(values.len(), values.iter().map(|x| 1.0 / x.max(f64::MIN_POSITIVE).sqrt()));
    let h_inv = &v * DMatrix::from_diagonal(&inv_sqrt) * v.transpose();
    (m * h_inv, smin)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigen_sorted() {
        let m = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        let (v, vecs) = sym_eigen(&m);
        assert!((v[0] - 1.0).abs() < 1e-14 && (v[1] - 3.0).abs() < 1e-14);
        let x = vecs.column(1);
        assert!((x[0].abs() - x[1].abs()).abs() < 1e-14);
    }

    #[test]
    fn polar_of_rotation_times_spd() {
        let (s, c) = (0.3f64.sin(), 0.3f64.cos());
        let r = DMatrix::from_row_slice(2, 2, &[c, -s, s, c]);
        let h = DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0]);
        let (o, _) = polar_factor(&(&r * &h));
        assert!((o - r).norm() < 1e-12);
    }
}

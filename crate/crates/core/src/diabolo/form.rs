use nalgebra::{DMatrix, Matrix2};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg;

/// Smallest singular value of the window/reference overlap accepted by
/// [`effective_form`].
pub const OVERLAP_FLOOR: f64 = 1e-3;

/// A symmetric 2x2 form in a fixed reference frame.
///
/// With `x = (q11 - q22)/2`, `y = q12` and trace `tau`, the eigenvalues are
/// `tau/2 -+ sqrt(x^2 + y^2)`; the form is degenerate exactly at `x = y = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QuadraticForm2 {
    pub q11: f64,
    pub q12: f64,
    pub q22: f64,
}

impl QuadraticForm2 {
    pub fn new(q11: f64, q12: f64, q22: f64) -> Self {
        QuadraticForm2 { q11, q12, q22 }
    }

    /// `tau/2 + x`, `y`, `tau/2 - x`.
    pub fn from_xy(x: f64, y: f64, tau: f64) -> Self {
        QuadraticForm2 { q11: tau / 2.0 + x, q12: y, q22: tau / 2.0 - x }
    }

    pub fn from_matrix(m: &Matrix2<f64>) -> Self {
        QuadraticForm2 { q11: m[(0, 0)], q12: 0.5 * (m[(0, 1)] + m[(1, 0)]), q22: m[(1, 1)] }
    }

    pub fn matrix(&self) -> Matrix2<f64> {
        Matrix2::new(self.q11, self.q12, self.q12, self.q22)
    }

    pub fn x(&self) -> f64 {
        0.5 * (self.q11 - self.q22)
    }

    pub fn y(&self) -> f64 {
        self.q12
    }

    pub fn trace(&self) -> f64 {
        self.q11 + self.q22
    }

    pub fn radius(&self) -> f64 {
        self.x().hypot(self.y())
    }

    /// Ascending eigenvalues from the trace-free coordinates.
    pub fn eigenvalues(&self) -> [f64; 2] {
        let (m, r) = (0.5 * self.trace(), self.radius());
        [m - r, m + r]
    }

    /// Unit eigenvector of the lower eigenvalue, `(-sin(phi/2), cos(phi/2))`
    /// rotated by `pi/2` from the upper one, where `phi` is the angle of `(x, y)`.
    pub fn lower_eigenvector(&self) -> [f64; 2] {
        let half = 0.5 * self.y().atan2(self.x());
        [-half.sin(), half.cos()]
    }

    /// The form expressed in the frame rotated by `angle`: `R^T q R`.
    pub fn rotated(&self, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        let r = Matrix2::new(c, -s, s, c);
        QuadraticForm2::from_matrix(&(r.transpose() * self.matrix() * r))
    }
}

/// The form induced on the reference plane by a two-dimensional eigenspace.
///
/// `window` holds two orthonormal eigenvectors with eigenvalues `mu`;
/// `reference` holds an orthonormal basis of the reference plane, both in one
/// ambient Euclidean frame. The identification is the orthogonal polar factor
/// `O` of the overlap `M = reference^T window`, and the result is
/// `O diag(mu) O^T`. Sign or rotation changes of the window basis inside an
/// eigenspace change `O` on the right only, so the form does not depend on the
/// eigensolver's choice of vectors.
pub fn effective_form(window: &DMatrix<f64>, mu: [f64; 2], reference: &DMatrix<f64>) -> Result<QuadraticForm2> {
    if window.ncols() != 2 || reference.ncols() != 2 {
        return Err(Error::InvalidInput(format!(
            "effective form needs two window vectors and two reference vectors, got {} and {}",
            window.ncols(),
            reference.ncols()
        )));
    }
    if window.nrows() != reference.nrows() {
        return Err(Error::AmbientMismatch(window.nrows(), reference.nrows()));
    }
    let overlap = reference.transpose() * window;
    let (o, smin) = linalg::polar_factor(&overlap);
    if smin < OVERLAP_FLOOR {
        return Err(Error::DegenerateOverlap(smin));
    }
    let q = &o * DMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(&mu)) * o.transpose();
    Ok(QuadraticForm2::new(q[(0, 0)], 0.5 * (q[(0, 1)] + q[(1, 0)]), q[(1, 1)]))
}

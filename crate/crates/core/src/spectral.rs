//! Coexact spectra, Hodge bookkeeping, spectral windows and subspace distances.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::complex::{
    betti_by_rank, kernel_dim, laplacian, weighted_coboundary, Cochain, SimplicialComplex, WeightSystem,
};
use crate::error::{Error, Result};
use crate::linalg;

/// Eigenvalues of the up-Laplacian below this fraction of the largest one
/// are treated as zero.
pub const COEXACT_CUT: f64 = 1e-11;
/// Multiset comparisons are made after dividing by the spectral radius.
pub const CONSISTENCY_TOL: f64 = 1e-9;
/// Minimal distance between a window endpoint and the spectrum.
pub const WINDOW_MARGIN: f64 = 1e-8;

/// Nonzero eigenvalues of the up-Laplacian in degree `p`, ascending, with
/// eigenvectors in symmetrised coordinates `W_p^{1/2} phi`.
///
/// The eigenvectors are the nonzero modes of `B_p^T B_p`, so they lie in the
/// image of the codifferential by construction.
#[derive(Clone, Debug)]
pub struct CoexactSpectrum {
    pub degree: usize,
    pub values: Vec<f64>,
    pub modes: DMatrix<f64>,
}

impl CoexactSpectrum {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// The `i`-th eigencochain (0-based), unit norm in the weighted inner product.
    pub fn cochain(&self, i: usize, w: &WeightSystem) -> Cochain {
        Cochain::from_symmetric(self.degree, &self.modes.column(i).into_owned(), w)
    }
}

pub fn coexact_spectrum(k: &SimplicialComplex, w: &WeightSystem, p: usize) -> Result<CoexactSpectrum> {
    if p > k.top_dim() {
        return Err(Error::DegreeOutOfRange { degree: p, max: k.top_dim() });
    }
    w.check(k)?;
    let b = weighted_coboundary(k, w, p);
    let (values, modes) = linalg::gram_pairs(&b, COEXACT_CUT);
    Ok(CoexactSpectrum { degree: p, values, modes })
}

/// Full spectrum of the degree-`p` Laplacian, ascending.
pub fn full_spectrum(k: &SimplicialComplex, w: &WeightSystem, p: usize) -> Result<Vec<f64>> {
    Ok(laplacian(k, w, p)?.spectrum())
}

#[derive(Clone, Debug, Serialize)]
pub struct ConsistencyReport {
    pub degree: usize,
    pub betti: usize,
    pub kernel_dim: usize,
    pub nonzero: usize,
    pub spectral_radius: f64,
    /// Largest eigenvalue mismatch divided by the spectral radius.
    pub max_deviation: f64,
    pub passed: bool,
}

/// Checks that the nonzero spectrum of `L_p` is the union of the coexact
/// spectra in degrees `p - 1` and `p`, and that the kernel has dimension `b_p`.
pub fn hodge_consistency(k: &SimplicialComplex, w: &WeightSystem, p: usize) -> Result<ConsistencyReport> {
    let full = full_spectrum(k, w, p)?;
    let radius = full.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let betti = betti_by_rank(k)[p];
    let kernel = kernel_dim(&full);
    let nonzero: Vec<f64> = full[kernel..].to_vec();

    let mut expected = coexact_spectrum(k, w, p)?.values;
    if p > 0 {
        expected.extend(coexact_spectrum(k, w, p - 1)?.values);
    }
    expected.sort_by(f64::total_cmp);

    let scale = if radius > 0.0 { radius } else { 1.0 };
    if expected.len() != nonzero.len() || kernel != betti {
        let offending = first_unmatched(&nonzero, &expected, scale).unwrap_or(0.0);
        return Err(Error::ConsistencyViolation { degree: p, eigenvalue: offending, deviation: f64::INFINITY });
    }
    let mut max_dev = 0.0f64;
    for (a, b) in nonzero.iter().zip(&expected) {
        let dev = (a - b).abs() / scale;
        if dev > CONSISTENCY_TOL {
            return Err(Error::ConsistencyViolation { degree: p, eigenvalue: *a, deviation: dev });
        }
        max_dev = max_dev.max(dev);
    }
    Ok(ConsistencyReport {
        degree: p,
        betti,
        kernel_dim: kernel,
        nonzero: nonzero.len(),
        spectral_radius: radius,
        max_deviation: max_dev,
        passed: true,
    })
}

fn first_unmatched(a: &[f64], b: &[f64], scale: f64) -> Option<f64> {
    let mut used = vec![false; b.len()];
    for &x in a {
        match (0..b.len()).find(|&j| !used[j] && (b[j] - x).abs() <= CONSISTENCY_TOL * scale) {
            Some(j) => used[j] = true,
            None => return Some(x),
        }
    }
    (0..b.len()).find(|&j| !used[j]).map(|j| b[j])
}

/// Removes every element of `sub` from the sorted multiset `from`, matching
/// within `tol`. Returns `None` when some element has no partner.
fn multiset_minus(from: &[f64], sub: &[f64], tol: f64) -> Option<Vec<f64>> {
    let mut used = vec![false; from.len()];
    let mut sub = sub.to_vec();
    sub.sort_by(f64::total_cmp);
    let mut start = 0;
    for x in sub {
        while start < from.len() && (used[start] || from[start] < x - tol) {
            start += 1;
        }
        let j = (start..from.len()).find(|&j| !used[j] && (from[j] - x).abs() <= tol)?;
        used[j] = true;
    }
    Some(from.iter().zip(&used).filter(|(_, u)| !**u).map(|(x, _)| *x).collect())
}

/// Recovers the coexact spectra degree by degree from full spectra and Betti
/// numbers: `coex_p = full_p - {0 x b_p} - coex_{p-1}`.
pub fn coexact_from_full(full: &[Vec<f64>], betti: &[usize]) -> Result<Vec<Vec<f64>>> {
    if full.len() != betti.len() {
        return Err(Error::InconsistentSpectra(format!(
            "{} spectra but {} Betti numbers",
            full.len(),
            betti.len()
        )));
    }
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(full.len());
    for (p, spec) in full.iter().enumerate() {
        let mut sorted = spec.clone();
        sorted.sort_by(f64::total_cmp);
        let radius = sorted.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let tol = CONSISTENCY_TOL * radius.max(1.0);
        let zeros = vec![0.0; betti[p]];
        let without_kernel = multiset_minus(&sorted, &zeros, tol).ok_or_else(|| {
            Error::InconsistentSpectra(format!("degree {p}: fewer than {} zero eigenvalues", betti[p]))
        })?;
        let prev: &[f64] = if p > 0 { &out[p - 1] } else { &[] };
        let coex = multiset_minus(&without_kernel, prev, tol).ok_or_else(|| {
            Error::InconsistentSpectra(format!("degree {p}: coexact values of degree {} are missing", p.wrapping_sub(1)))
        })?;
        if let Some(z) = coex.iter().find(|x| x.abs() <= tol) {
            return Err(Error::InconsistentSpectra(format!("degree {p}: unexplained zero eigenvalue {z:e}")));
        }
        out.push(coex);
    }
    Ok(out)
}

/// Coexact eigenpairs with eigenvalue in an open interval and the subspace
/// they span.
#[derive(Clone, Debug)]
pub struct SpectralWindow {
    pub interval: (f64, f64),
    pub degree: usize,
    pub values: Vec<f64>,
    /// Orthonormal basis in symmetrised coordinates.
    pub basis: DMatrix<f64>,
}

impl SpectralWindow {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn cochains(&self, w: &WeightSystem) -> Vec<Cochain> {
        (0..self.dim())
            .map(|i| Cochain::from_symmetric(self.degree, &self.basis.column(i).into_owned(), w))
            .collect()
    }
}

pub fn spectral_window(
    k: &SimplicialComplex,
    w: &WeightSystem,
    p: usize,
    interval: (f64, f64),
) -> Result<SpectralWindow> {
    let spec = coexact_spectrum(k, w, p)?;
    window_of(&spec, interval)
}

/// Restricts an already computed coexact spectrum to a window.
pub fn window_of(spec: &CoexactSpectrum, (a, b): (f64, f64)) -> Result<SpectralWindow> {
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::InvalidWindow(a, b));
    }
    for &mu in &spec.values {
        for endpoint in [a, b] {
            let distance = (mu - endpoint).abs();
            if distance < WINDOW_MARGIN * endpoint.abs().max(1.0) {
                return Err(Error::EndpointTooCloseToSpectrum { endpoint, eigenvalue: mu, distance });
            }
        }
    }
    let inside: Vec<usize> = (0..spec.len()).filter(|&i| spec.values[i] > a && spec.values[i] < b).collect();
    Ok(SpectralWindow {
        interval: (a, b),
        degree: spec.degree,
        values: inside.iter().map(|&i| spec.values[i]).collect(),
        basis: DMatrix::from_fn(spec.modes.nrows(), inside.len(), |r, c| spec.modes[(r, inside[c])]),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SubspaceDistance {
    /// Sine of the largest principal angle, measured from the smaller subspace.
    pub distance: f64,
    pub dimension_mismatch: bool,
}

/// Largest-principal-angle distance between the column spans of `e` and `f`.
///
/// Both are taken as orthonormal bases in a common Euclidean frame (for
/// cochains, the symmetrised frame, where the weighted inner product becomes
/// the standard one).
pub fn subspace_distance(e: &DMatrix<f64>, f: &DMatrix<f64>) -> Result<SubspaceDistance> {
    if e.nrows() != f.nrows() {
        return Err(Error::AmbientMismatch(e.nrows(), f.nrows()));
    }
    let e = linalg::orthonormal_columns(e);
    let f = linalg::orthonormal_columns(f);
    let (small, large) = if e.ncols() <= f.ncols() { (&e, &f) } else { (&f, &e) };
    let distance = if small.ncols() == 0 {
        0.0
    } else {
        let residual = small - large * (large.transpose() * small);
        linalg::singular_values(&residual).first().copied().unwrap_or(0.0).min(1.0)
    };
    Ok(SubspaceDistance { distance, dimension_mismatch: e.ncols() != f.ncols() })
}

/// `{:.16e}`: 17 significant digits.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// CSV with header `p,i,mu`, one row per eigenvalue, `i` starting at 1.
pub fn spectrum_csv(rows: &[(usize, Vec<f64>)]) -> String {
    let mut out = String::from("p,i,mu\n");
    for (p, values) in rows {
        for (i, mu) in values.iter().enumerate() {
            out.push_str(&format!("{p},{},{}\n", i + 1, format_float(*mu)));
        }
    }
    out
}

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use super::attach::{attach, AttachmentSpec, Glued, Weighted};
use crate::complex::betti_by_rank;
use crate::error::{Error, Result};
use crate::spectral::{coexact_spectrum, format_float, subspace_distance, window_of, CoexactSpectrum};

/// Sorted multiset union of coexact spectra of one degree.
pub fn union_spectrum(parts: &[CoexactSpectrum]) -> Result<Vec<f64>> {
    if let Some(first) = parts.first() {
        if let Some(other) = parts.iter().find(|s| s.degree != first.degree) {
            return Err(Error::DegreeMismatch(first.degree, other.degree));
        }
    }
    let mut all: Vec<f64> = parts.iter().flat_map(|s| s.values.iter().copied()).collect();
    all.sort_by(f64::total_cmp);
    Ok(all)
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanRow {
    pub eps: f64,
    pub values: Vec<f64>,
    pub deviations: Vec<f64>,
    pub max_deviation: f64,
    pub window_dim: usize,
    pub subspace_distance: f64,
    pub dimension_mismatch: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceScan {
    pub degree: usize,
    pub window: (f64, f64),
    /// Limit spectrum, truncated to the requested count.
    pub reference: Vec<f64>,
    pub rows: Vec<ScanRow>,
}

impl ConvergenceScan {
    /// `eps,i,mu_i,deviation,subspace_distance`, one line per eigenvalue.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("eps,i,mu,deviation,subspace_distance\n");
        for row in &self.rows {
            for (i, (mu, dev)) in row.values.iter().zip(&row.deviations).enumerate() {
                out.push_str(&format!(
                    "{},{},{},{},{}\n",
                    format_float(row.eps),
                    i + 1,
                    format_float(*mu),
                    format_float(*dev),
                    format_float(row.subspace_distance)
                ));
            }
        }
        out
    }

    pub fn deviations_decreasing(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].max_deviation < w[0].max_deviation)
    }

    pub fn distances_decreasing(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].subspace_distance < w[0].subspace_distance)
    }
}

/// Coexact eigenvalues of the glued complex against the union of the parts'
/// spectra, for each coupling in `eps_list`.
///
/// The reference is the union of the parts' spectra, preceded by one zero for
/// every harmonic form the handles destroy. Each part's attachment spec is
/// reused with its coupling replaced. The decoupled window subspace is
/// computed on the `eps = 0` union, whose simplices are a prefix of every
/// coupled complex, and compared after padding with zeros on the connectors.
pub fn convergence_scan(
    base: Weighted<'_>,
    parts: &[(Weighted<'_>, &AttachmentSpec)],
    p: usize,
    eps_list: &[f64],
    count: usize,
    window: (f64, f64),
) -> Result<ConvergenceScan> {
    if eps_list.is_empty() || eps_list.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
        return Err(Error::InvalidInput("couplings must be positive".into()));
    }
    if eps_list.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidInput("couplings must be strictly decreasing".into()));
    }
    let glue_at = |eps: f64| -> Result<Glued> {
        let specs: Vec<AttachmentSpec> = parts.iter().map(|(_, s)| s.with_eps(eps)).collect();
        let with: Vec<(Weighted<'_>, &AttachmentSpec)> =
            parts.iter().zip(&specs).map(|(&(part, _), s)| (part, s)).collect();
        attach(base, &with)
    };

    let decoupled = glue_at(0.0)?;
    let mut pieces = vec![coexact_spectrum(base.0, base.1, p)?];
    for &((k, w), _) in parts {
        pieces.push(coexact_spectrum(k, w, p)?);
    }
    let mut reference = union_spectrum(&pieces)?;
    // harmonic forms destroyed by the handles become small coexact modes
    let coupled_betti = betti_by_rank(&glue_at(eps_list[0])?.complex);
    let lost = betti_by_rank(&decoupled.complex)[p].saturating_sub(coupled_betti.get(p).copied().unwrap_or(0));
    reference.splice(0..0, std::iter::repeat(0.0).take(lost));
    reference.truncate(count);
    let decoupled_spec = coexact_spectrum(&decoupled.complex, &decoupled.weights, p)?;
    let touches = |e: Error, eps: f64| match e {
        Error::EndpointTooCloseToSpectrum { endpoint, eigenvalue, .. } => {
            Error::WindowTouchesSpectrum { endpoint, eigenvalue, eps }
        }
        other => other,
    };
    let e0 = window_of(&decoupled_spec, window).map_err(|e| touches(e, 0.0))?;

    let rows: Vec<Result<ScanRow>> = eps_list
        .par_iter()
        .map(|&eps| {
            let g = glue_at(eps)?;
            let spec = coexact_spectrum(&g.complex, &g.weights, p)?;
            let win = window_of(&spec, window).map_err(|e| touches(e, eps))?;
            let n = g.complex.count(p);
            let mut padded = DMatrix::zeros(n, e0.dim());
            padded.rows_mut(0, e0.basis.nrows()).copy_from(&e0.basis);
            let dist = subspace_distance(&padded, &win.basis)?;
            let values: Vec<f64> = spec.values.iter().take(reference.len()).copied().collect();
            let deviations: Vec<f64> = values.iter().zip(&reference).map(|(a, b)| (a - b).abs()).collect();
            Ok(ScanRow {
                eps,
                max_deviation: deviations.iter().copied().fold(0.0, f64::max),
                values,
                deviations,
                window_dim: win.dim(),
                subspace_distance: dist.distance,
                dimension_mismatch: dist.dimension_mismatch,
            })
        })
        .collect();
    Ok(ConvergenceScan { degree: p, window, reference, rows: rows.into_iter().collect::<Result<_>>()? })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::WeightSystem;
    use crate::fixtures;

    fn cs(values: &[f64], degree: usize) -> CoexactSpectrum {
        CoexactSpectrum { degree, values: values.to_vec(), modes: DMatrix::zeros(0, values.len()) }
    }

    #[test]
    fn union_examples() {
        assert_eq!(union_spectrum(&[cs(&[3.0, 3.0], 0), cs(&[], 0)]).unwrap(), vec![3.0, 3.0]);
        assert_eq!(union_spectrum(&[cs(&[1.0, 4.0], 1), cs(&[2.0], 1)]).unwrap(), vec![1.0, 2.0, 4.0]);
        assert_eq!(union_spectrum(&[cs(&[2.0, 2.0], 1), cs(&[2.0], 1)]).unwrap(), vec![2.0; 3]);
        assert!(matches!(union_spectrum(&[cs(&[1.0], 0), cs(&[1.0], 1)]), Err(Error::DegreeMismatch(0, 1))));
    }

    #[test]
    fn two_triangle_scan() {
        let tri = fixtures::triangle_boundary();
        let w = WeightSystem::uniform(&tri);
        let spec = AttachmentSpec::single(vec![0], vec![0], 1.0).unwrap();
        let scan =
            convergence_scan((&tri, &w), &[((&tri, &w), &spec)], 0, &[1e-1, 1e-2, 1e-3], 4, (2.0, 4.0)).unwrap();
        assert!(scan.deviations_decreasing());
        assert!(scan.distances_decreasing());
        let fine = convergence_scan((&tri, &w), &[((&tri, &w), &spec)], 0, &[1e-6], 4, (2.0, 4.0)).unwrap();
        assert!(fine.rows[0].max_deviation < 1e-4);
        assert!(scan.to_csv().starts_with("eps,i,mu,deviation,subspace_distance\n"));
    }

    #[test]
    fn window_touching_spectrum() {
        let tri = fixtures::triangle_boundary();
        let w = WeightSystem::uniform(&tri);
        let spec = AttachmentSpec::single(vec![0], vec![0], 1.0).unwrap();
        let err = convergence_scan((&tri, &w), &[((&tri, &w), &spec)], 0, &[1e-1], 4, (3.0, 4.0)).unwrap_err();
        assert!(matches!(err, Error::WindowTouchesSpectrum { .. }));
    }
}

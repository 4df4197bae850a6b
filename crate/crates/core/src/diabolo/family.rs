use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::domain::DomainRect;
use super::form::{effective_form, QuadraticForm2};
use crate::complex::{homothety, SimplicialComplex, WeightSystem};
use crate::error::{Error, Result};
use crate::gluing::{attach, dumbbell, AttachmentSpec, DumbbellGadget, Glued, Weighted};
use crate::spectral::{coexact_spectrum, window_of, CoexactSpectrum};

/// Fixed parameters of a two-gadget family; the family itself is indexed by
/// `(lambda2, theta)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyParams {
    pub n: usize,
    pub p: usize,
    pub lambda1: f64,
    pub eta: f64,
    pub eps: f64,
    pub u: f64,
    pub window: (f64, f64),
    /// Rotation of the second gadget's profile at `theta = 0`.
    #[serde(default)]
    pub theta_origin: f64,
}

impl FamilyParams {
    pub fn validate(&self) -> Result<()> {
        let (a, b) = self.window;
        if !(self.eta > 0.0 && self.lambda1 - self.eta > a && self.lambda1 + self.eta < b) {
            return Err(Error::InvalidInput(format!(
                "lambda1 -+ eta = {} -+ {} must lie inside the window ({a}, {b})",
                self.lambda1, self.eta
            )));
        }
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return Err(Error::InvalidInput(format!("coupling must be positive, got {}", self.eps)));
        }
        Ok(())
    }

    pub fn domain(&self) -> DomainRect {
        DomainRect::around(self.lambda1, self.eta)
    }
}

/// One evaluation of a two-parameter family of 2x2 forms.
#[derive(Clone, Debug)]
pub struct FamilySample {
    pub form: QuadraticForm2,
    /// The two window eigenvalues, ascending.
    pub mu: [f64; 2],
    /// Eigenvector of `mu[0]` in a frame shared by all parameter values.
    pub lower: DVector<f64>,
}

impl FamilySample {
    pub fn gap(&self) -> f64 {
        (self.mu[1] - self.mu[0]).max(0.0)
    }
}

/// Anything that yields an effective form at each `(lambda2, theta)`.
pub trait FormFamily: Sync {
    fn evaluate(&self, lambda2: f64, theta: f64) -> Result<FamilySample>;
}

/// A family given directly by its 2x2 form.
pub struct SyntheticFamily<F> {
    form: F,
}

impl<F: Fn(f64, f64) -> QuadraticForm2 + Sync> SyntheticFamily<F> {
    pub fn new(form: F) -> Self {
        SyntheticFamily { form }
    }
}

impl<F: Fn(f64, f64) -> QuadraticForm2 + Sync> FormFamily for SyntheticFamily<F> {
    fn evaluate(&self, a: f64, b: f64) -> Result<FamilySample> {
        let form = (self.form)(a, b);
        let v = form.lower_eigenvector();
        Ok(FamilySample { form, mu: form.eigenvalues(), lower: DVector::from_row_slice(&v) })
    }
}

/// Ring profile `1.2 + cos(2 pi k / m)`, normalised to sum one and rotated by
/// `angle`, i.e. shifted by `angle m / (2 pi)` sites with linear interpolation.
pub fn ring_profile(m: usize, angle: f64) -> Vec<f64> {
    let base: Vec<f64> = (0..m).map(|k| 1.2 + (2.0 * PI * k as f64 / m as f64).cos()).collect();
    let total: f64 = base.iter().sum();
    let shift = angle * m as f64 / (2.0 * PI);
    (0..m)
        .map(|k| {
            let x = (k as f64 - shift).rem_euclid(m as f64);
            let i = x.floor() as usize % m;
            let f = x - x.floor();
            ((1.0 - f) * base[i] + f * base[(i + 1) % m]) / total
        })
        .collect()
}

/// One gadget hung from a base simplex: tuned so its small eigenvalue is
/// `lambda`, attached with the ring profile rotated by `angle`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GadgetSlot {
    pub site: Vec<usize>,
    pub lambda: f64,
    pub angle: f64,
}

/// A base, one dumbbell gadget type and a coupling; glues any list of
/// gadget slots onto the base.
#[derive(Clone, Debug)]
pub struct Assembly {
    pub base: SimplicialComplex,
    pub base_weights: WeightSystem,
    pub gadget: DumbbellGadget,
    pub eps: f64,
    small: CoexactSpectrum,
}

impl Assembly {
    pub fn new(base: Weighted<'_>, gadget: DumbbellGadget, eps: f64) -> Result<Self> {
        let small = gadget.coexact(gadget.p)?;
        Ok(Assembly { base: base.0.clone(), base_weights: base.1.clone(), gadget, eps, small })
    }

    pub fn degree(&self) -> usize {
        self.gadget.p
    }

    /// Gadget weights scaled so the small eigenvalue is `lambda`.
    pub fn tuned(&self, lambda: f64) -> Result<WeightSystem> {
        if !(lambda > 0.0) {
            return Err(Error::InvalidInput(format!("target eigenvalue must be positive, got {lambda}")));
        }
        homothety(&self.gadget.weights, (self.small.values[0] / lambda).sqrt(), self.gadget.n)
    }

    /// The gadget's small mode in its symmetric coordinates.
    pub fn small_mode(&self) -> DVector<f64> {
        self.small.modes.column(0).into_owned()
    }

    /// Base plus one gadget per slot, in slot order.
    pub fn glue(&self, slots: &[GadgetSlot]) -> Result<Glued> {
        let m = self.gadget.ring.len();
        let parts: Vec<(WeightSystem, AttachmentSpec)> = slots
            .iter()
            .map(|s| {
                let sites = self.gadget.sites().into_iter().map(|g| (s.site.clone(), g)).collect();
                Ok((self.tuned(s.lambda)?, AttachmentSpec::new(sites, self.eps, ring_profile(m, s.angle))?))
            })
            .collect::<Result<_>>()?;
        let g = &self.gadget.complex;
        let with: Vec<(Weighted<'_>, &AttachmentSpec)> = parts.iter().map(|(w, s)| ((g, w), s)).collect();
        attach((&self.base, &self.base_weights), &with)
    }
}

/// Two gadgets on a base, the first tuned to `lambda1`, the second tuned to
/// `lambda2` and attached with its ring profile rotated by
/// `theta_origin + theta`, plus any number of fixed gadgets.
///
/// The reference plane is spanned by the pair's small modes, extended by
/// zero; the glued simplex layout does not depend on `(lambda2, theta)`, so
/// one reference serves the whole family.
#[derive(Clone, Debug)]
pub struct GluedFamily {
    pub params: FamilyParams,
    pub assembly: Assembly,
    /// Base simplices the pair hangs from.
    pub pair_sites: [Vec<usize>; 2],
    /// Gadgets glued after the pair and held fixed.
    pub fixed: Vec<GadgetSlot>,
    reference: DMatrix<f64>,
}

impl GluedFamily {
    /// Both gadgets hang from the first degree-`p` simplex of the base.
    pub fn new(params: FamilyParams, base: Weighted<'_>) -> Result<Self> {
        let site = base
            .0
            .simplices(params.p)
            .first()
            .cloned()
            .ok_or_else(|| Error::PreconditionViolated(format!("base has no simplex of dimension {}", params.p)))?;
        let assembly = Assembly::new(base, dumbbell(params.n, params.p, params.u)?, params.eps)?;
        Self::assemble(params, assembly, [site.clone(), site], Vec::new())
    }

    pub fn assemble(params: FamilyParams, assembly: Assembly, pair_sites: [Vec<usize>; 2], fixed: Vec<GadgetSlot>) -> Result<Self> {
        params.validate()?;
        if assembly.degree() != params.p {
            return Err(Error::DegreeMismatch(assembly.degree(), params.p));
        }
        let spec = coexact_spectrum(&assembly.base, &assembly.base_weights, params.p)?;
        let (a, b) = params.window;
        if let Some(e) = spec.values.iter().find(|&&e| e > a && e < b) {
            return Err(Error::PreconditionViolated(format!("base eigenvalue {e} lies in the window ({a}, {b})")));
        }
        let mut fam = GluedFamily { params, assembly, pair_sites, fixed, reference: DMatrix::zeros(0, 2) };
        let g = fam.glued(fam.params.lambda1, 0.0)?;
        let omega = fam.assembly.small_mode();
        let p = fam.params.p;
        let mut r = DMatrix::zeros(g.complex.count(p), 2);
        r.set_column(0, &g.embed_part(0, p, &omega));
        r.set_column(1, &g.embed_part(1, p, &omega));
        fam.reference = r;
        Ok(fam)
    }

    /// Slots of the pair at `(lambda2, theta)` followed by the fixed gadgets.
    pub fn slots(&self, lambda2: f64, theta: f64) -> Vec<GadgetSlot> {
        let [s1, s2] = self.pair_sites.clone();
        let mut slots = vec![
            GadgetSlot { site: s1, lambda: self.params.lambda1, angle: 0.0 },
            GadgetSlot { site: s2, lambda: lambda2, angle: self.params.theta_origin + theta },
        ];
        slots.extend(self.fixed.iter().cloned());
        slots
    }

    /// The glued complex at `(lambda2, theta)`.
    pub fn glued(&self, lambda2: f64, theta: f64) -> Result<Glued> {
        self.assembly.glue(&self.slots(lambda2, theta))
    }

    /// Orthonormal basis of the reference plane in symmetric coordinates.
    pub fn reference(&self) -> &DMatrix<f64> {
        &self.reference
    }

    /// Same family with another `theta_origin` or `eta`.
    pub fn reparametrised(&self, theta_origin: f64, eta: f64) -> Result<Self> {
        let mut params = self.params.clone();
        params.theta_origin = theta_origin;
        params.eta = eta;
        params.validate()?;
        Ok(GluedFamily { params, ..self.clone() })
    }
}

impl FormFamily for GluedFamily {
    fn evaluate(&self, lambda2: f64, theta: f64) -> Result<FamilySample> {
        let eps = self.params.eps;
        let g = self.glued(lambda2, theta)?;
        let spec = coexact_spectrum(&g.complex, &g.weights, self.params.p)?;
        let win = window_of(&spec, self.params.window).map_err(|e| match e {
            Error::EndpointTooCloseToSpectrum { endpoint, eigenvalue, .. } => {
                Error::WindowTouchesSpectrum { endpoint, eigenvalue, eps }
            }
            other => other,
        })?;
        if win.dim() != 2 {
            return Err(Error::WindowPollution { count: win.dim() });
        }
        let mu = [win.values[0], win.values[1]];
        let form = effective_form(&win.basis, mu, &self.reference)?;
        Ok(FamilySample { form, mu, lower: win.basis.column(0).into_owned() })
    }
}

/// The glued complex of `params` over `base` at `(lambda2, theta)`.
pub fn family(params: &FamilyParams, base: Weighted<'_>, lambda2: f64, theta: f64) -> Result<(SimplicialComplex, WeightSystem)> {
    let g = GluedFamily::new(params.clone(), base)?.glued(lambda2, theta)?;
    Ok((g.complex, g.weights))
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::fixtures;
    use crate::spectral::full_spectrum;

    pub(crate) fn scaled_octahedron() -> (SimplicialComplex, WeightSystem) {
        fixtures::diabolo_base()
    }

    pub(crate) fn params() -> FamilyParams {
        FamilyParams { n: 3, p: 1, lambda1: 1.0, eta: 0.25, eps: 0.5, u: 0.01, window: (0.5, 1.5), theta_origin: 0.0 }
    }

    #[test]
    fn profile_rotation() {
        let p0 = ring_profile(8, 0.0);
        assert!((p0.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        let half = ring_profile(8, PI);
        for k in 0..8 {
            assert!((half[k] - p0[(k + 4) % 8]).abs() < 1e-15);
        }
        let quarter_step = ring_profile(8, PI / 8.0);
        assert!((quarter_step[1] - 0.5 * (p0[0] + p0[1])).abs() < 1e-15);
    }

    #[test]
    fn window_holds_two_values() {
        let (k, w) = scaled_octahedron();
        let fam = GluedFamily::new(params(), (&k, &w)).unwrap();
        let s = fam.evaluate(1.25, 0.0).unwrap();
        assert!((s.mu[0] - 1.0).abs() < 0.1 * 0.25, "{:?}", s.mu);
        assert!(s.gap() > 0.0);
    }

    #[test]
    fn half_turn_conjugacy() {
        let (k, w) = scaled_octahedron();
        let fam = GluedFamily::new(params(), (&k, &w)).unwrap();
        for theta in [0.0, 0.7] {
            let a = fam.glued(1.1, theta).unwrap();
            let b = fam.glued(1.1, theta + PI).unwrap();
            let sa = full_spectrum(&a.complex, &a.weights, 1).unwrap();
            let sb = full_spectrum(&b.complex, &b.weights, 1).unwrap();
            let radius = sa.last().unwrap();
            for (x, y) in sa.iter().zip(&sb) {
                assert!((x - y).abs() < 1e-10 * radius);
            }
        }
    }

    #[test]
    fn strong_coupling_pollutes_window() {
        let (k, w) = scaled_octahedron();
        let fam = GluedFamily::new(FamilyParams { eps: 3.0, ..params() }, (&k, &w)).unwrap();
        let err = fam.evaluate(1.0, 0.0).unwrap_err();
        assert!(matches!(err, Error::WindowPollution { .. } | Error::WindowTouchesSpectrum { .. }), "{err}");
    }

    #[test]
    fn base_in_window_rejected() {
        let k = fixtures::octahedron_boundary();
        let w = WeightSystem::uniform(&k);
        let p = FamilyParams { lambda1: 2.0, window: (1.0, 3.0), ..params() };
        assert!(matches!(GluedFamily::new(p, (&k, &w)), Err(Error::PreconditionViolated(_))));
    }
}

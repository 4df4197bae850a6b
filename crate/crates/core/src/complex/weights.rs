use nalgebra::DVector;

use super::SimplicialComplex;
use crate::error::{Error, Result};

/// One positive weight per simplex: the discrete metric.
///
/// The inner product on `C^p` is diagonal in the simplex basis,
/// `<a, b> = sum_s w_p(s) a(s) b(s)`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightSystem {
    weights: Vec<Vec<f64>>,
}

impl WeightSystem {
    pub fn new(complex: &SimplicialComplex, weights: Vec<Vec<f64>>) -> Result<Self> {
        if weights.len() != complex.top_dim() + 1 {
            return Err(Error::InvalidWeights(format!(
                "{} weight arrays for a complex of dimension {}",
                weights.len(),
                complex.top_dim()
            )));
        }
        for (dim, w) in weights.iter().enumerate() {
            if w.len() != complex.count(dim) {
                return Err(Error::InvalidWeights(format!(
                    "dimension {dim}: {} weights for {} simplices",
                    w.len(),
                    complex.count(dim)
                )));
            }
            if let Some(bad) = w.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
                return Err(Error::InvalidWeights(format!("dimension {dim}: weight {bad} is not positive")));
            }
        }
        Ok(WeightSystem { weights })
    }

    pub fn uniform(complex: &SimplicialComplex) -> Self {
        WeightSystem { weights: complex.counts().into_iter().map(|n| vec![1.0; n]).collect() }
    }

    pub fn dim(&self, dim: usize) -> &[f64] {
        self.weights.get(dim).map_or(&[], |v| v.as_slice())
    }

    pub fn all(&self) -> &[Vec<f64>] {
        &self.weights
    }

    /// Checks that the index sets match `complex` exactly.
    pub fn check(&self, complex: &SimplicialComplex) -> Result<()> {
        WeightSystem::new(complex, self.weights.clone()).map(|_| ())
    }

    pub fn sqrt(&self, dim: usize) -> DVector<f64> {
        DVector::from_iterator(self.dim(dim).len(), self.dim(dim).iter().map(|w| w.sqrt()))
    }

    /// Multiplies all weights of one dimension by `factor`.
    pub fn scale_dim(&mut self, dim: usize, factor: f64) {
        for w in &mut self.weights[dim] {
            *w *= factor;
        }
    }
}

/// Total mass of the vertex weights, i.e. the squared norm of the constant
/// function 1.
pub fn volume(weights: &WeightSystem) -> f64 {
    weights.dim(0).iter().sum()
}

/// Discrete homothety `g -> c^2 g` for an `n`-dimensional model:
/// `w_p <- c^(n - 2p) w_p`.
///
/// Every eigenvalue of every Laplacian is multiplied by `c^-2` and the volume
/// by `c^n`.
pub fn homothety(weights: &WeightSystem, c: f64, n: usize) -> Result<WeightSystem> {
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::NonpositiveScale(c));
    }
    let scaled = weights
        .weights
        .iter()
        .enumerate()
        .map(|(p, w)| {
            let f = c.powi(n as i32 - 2 * p as i32);
            w.iter().map(|x| x * f).collect()
        })
        .collect();
    Ok(WeightSystem { weights: scaled })
}

/// A real coefficient per `p`-simplex.
#[derive(Clone, Debug, PartialEq)]
pub struct Cochain {
    pub degree: usize,
    pub values: DVector<f64>,
}

impl Cochain {
    pub fn new(complex: &SimplicialComplex, degree: usize, values: DVector<f64>) -> Result<Self> {
        let expected = complex.count(degree);
        if values.len() != expected {
            return Err(Error::CochainLength { degree, got: values.len(), expected });
        }
        Ok(Cochain { degree, values })
    }

    pub fn zeros(complex: &SimplicialComplex, degree: usize) -> Self {
        Cochain { degree, values: DVector::zeros(complex.count(degree)) }
    }

    /// Weighted inner product `sum_s w(s) a(s) b(s)`.
    pub fn inner(&self, other: &Cochain, weights: &WeightSystem) -> f64 {
        let w = weights.dim(self.degree);
        self.values.iter().zip(other.values.iter()).zip(w).map(|((a, b), w)| w * a * b).sum()
    }

    pub fn norm(&self, weights: &WeightSystem) -> f64 {
        self.inner(self, weights).sqrt()
    }

    /// Coordinates in the symmetrised frame, `W^{1/2} phi`.
    pub fn to_symmetric(&self, weights: &WeightSystem) -> DVector<f64> {
        self.values.component_mul(&weights.sqrt(self.degree))
    }

    pub fn from_symmetric(degree: usize, v: &DVector<f64>, weights: &WeightSystem) -> Cochain {
        Cochain { degree, values: v.component_div(&weights.sqrt(degree)) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path4() -> SimplicialComplex {
        SimplicialComplex::from_facets(&[vec![0, 1], vec![1, 2], vec![2, 3]]).unwrap()
    }

    #[test]
    fn volume_examples() {
        let k = path4();
        let w = WeightSystem::uniform(&k);
        assert_eq!(volume(&w), 4.0);
        let scaled = homothety(&w, 2.0, 3).unwrap();
        assert_eq!(volume(&scaled), 32.0);
        let tri = SimplicialComplex::from_facets(&[vec![0, 1], vec![1, 2], vec![0, 2]]).unwrap();
        let w = WeightSystem::new(&tri, vec![vec![0.5, 0.5, 1.0], vec![1.0; 3]]).unwrap();
        assert_eq!(volume(&w), 2.0);
    }

    #[test]
    fn homothety_rejects_nonpositive_scale() {
        let w = WeightSystem::uniform(&path4());
        assert!(matches!(homothety(&w, 0.0, 1), Err(Error::NonpositiveScale(_))));
        assert!(matches!(homothety(&w, -1.0, 1), Err(Error::NonpositiveScale(_))));
    }

    #[test]
    fn homothety_is_a_group_action() {
        let w = WeightSystem::uniform(&path4());
        let twice = homothety(&homothety(&w, 2f64.sqrt(), 2).unwrap(), 2f64.sqrt(), 2).unwrap();
        let once = homothety(&w, 2.0, 2).unwrap();
        for (a, b) in twice.all().iter().flatten().zip(once.all().iter().flatten()) {
            assert!((a - b).abs() <= 1e-12 * b.abs());
        }
        assert_eq!(homothety(&w, 1.0, 2).unwrap(), w);
    }

    #[test]
    fn negative_weight_rejected() {
        let k = path4();
        let err = WeightSystem::new(&k, vec![vec![1.0, 1.0, -1.0, 1.0], vec![1.0; 3]]).unwrap_err();
        assert!(matches!(err, Error::InvalidWeights(_)));
        let err = WeightSystem::new(&k, vec![vec![1.0; 3], vec![1.0; 3]]).unwrap_err();
        assert!(matches!(err, Error::InvalidWeights(_)));
    }
}

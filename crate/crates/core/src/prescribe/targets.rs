use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn default_n() -> usize {
    3
}

/// Low coexact spectrum to prescribe, per degree, with a volume.
///
/// JSON: `{"targets": {"1": [1.0, 2.0, 2.0]}, "volume": 50.0, "tol": 1e-3,
/// "ceiling": 10.0}`, plus an optional dimension `"n"` (default 3).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TargetSpectrum {
    pub targets: BTreeMap<usize, Vec<f64>>,
    pub volume: f64,
    pub tol: f64,
    pub ceiling: f64,
    #[serde(default = "default_n")]
    pub n: usize,
}

/// A target value with multiplicity one or two.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TargetGroup {
    pub value: f64,
    pub multiplicity: usize,
}

impl TargetSpectrum {
    pub fn read(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let t: TargetSpectrum = serde_json::from_str(text)?;
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.volume > 0.0) {
            return Err(Error::InvalidInput(format!("volume must be positive, got {}", self.volume)));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidInput(format!("tolerance must be positive, got {}", self.tol)));
        }
        for (&p, values) in &self.targets {
            if p == 0 {
                return Err(Error::InvalidInput("degree 0 cannot be prescribed".into()));
            }
            if values.is_empty() || values.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
                return Err(Error::InvalidInput(format!("degree {p}: targets must be positive")));
            }
            if values.windows(2).any(|w| w[1] < w[0]) {
                return Err(Error::InvalidInput(format!("degree {p}: targets must be sorted")));
            }
            if let Some(&m) = values.iter().find(|&&v| v >= self.ceiling) {
                return Err(Error::InvalidInput(format!("target {m} is not below the ceiling {}", self.ceiling)));
            }
            self.groups(p)?;
        }
        Ok(())
    }

    /// Distinct values of degree `p` with their multiplicities.
    pub fn groups(&self, p: usize) -> Result<Vec<TargetGroup>> {
        let mut out: Vec<TargetGroup> = Vec::new();
        for &v in self.targets.get(&p).map(Vec::as_slice).unwrap_or(&[]) {
            match out.last_mut() {
                Some(g) if (v - g.value).abs() <= 1e-12 * v.abs().max(1.0) => g.multiplicity += 1,
                _ => out.push(TargetGroup { value: v, multiplicity: 1 }),
            }
        }
        if let Some(g) = out.iter().find(|g| g.multiplicity > 2) {
            return Err(Error::TargetsTooClose(format!(
                "degree {p}: value {} requested with multiplicity {}",
                g.value, g.multiplicity
            )));
        }
        Ok(out)
    }

    /// Separation radius: 0.4 times the smallest gap between distinct values
    /// (or the smallest value, if smaller).
    pub fn delta(&self, p: usize) -> Result<f64> {
        let g = self.groups(p)?;
        let gaps = g.windows(2).map(|w| w[1].value - w[0].value);
        Ok(0.4 * gaps.chain(g.first().map(|g| g.value)).fold(f64::INFINITY, f64::min))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_group() {
        let t = TargetSpectrum::parse(r#"{"targets": {"1": [1.0, 2.0, 2.0]}, "volume": 50.0, "tol": 1e-3, "ceiling": 10.0}"#)
            .unwrap();
        assert_eq!(t.n, 3);
        let g = t.groups(1).unwrap();
        assert_eq!(g, vec![TargetGroup { value: 1.0, multiplicity: 1 }, TargetGroup { value: 2.0, multiplicity: 2 }]);
        assert!((t.delta(1).unwrap() - 0.4).abs() < 1e-15);
    }

    #[test]
    fn triple_rejected() {
        let err = TargetSpectrum::parse(r#"{"targets": {"1": [1.0, 1.0, 1.0]}, "volume": 5.0, "tol": 1e-3, "ceiling": 10.0}"#)
            .unwrap_err();
        assert!(matches!(err, Error::TargetsTooClose(_)));
    }

    #[test]
    fn bad_inputs() {
        for text in [
            r#"{"targets": {"1": [2.0, 1.0]}, "volume": 5.0, "tol": 1e-3, "ceiling": 10.0}"#,
            r#"{"targets": {"1": [1.0]}, "volume": -5.0, "tol": 1e-3, "ceiling": 10.0}"#,
            r#"{"targets": {"1": [11.0]}, "volume": 5.0, "tol": 1e-3, "ceiling": 10.0}"#,
        ] {
            assert!(matches!(TargetSpectrum::parse(text), Err(Error::InvalidInput(_))), "{text}");
        }
    }
}

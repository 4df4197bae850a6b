use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{SimplicialComplex, WeightSystem};
use crate::error::{Error, Result};

/// On-disk form of a weighted complex.
///
/// Keys of `simplices` and `weights` are decimal dimensions. Weight arrays
/// align positionally with the simplex arrays; a missing `weights` object means
/// unit weights.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ComplexFile {
    pub top_dim: usize,
    pub simplices: BTreeMap<String, Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<BTreeMap<String, Vec<f64>>>,
}

impl ComplexFile {
    pub fn from_parts(k: &SimplicialComplex, w: &WeightSystem) -> Self {
        let simplices =
            (0..=k.top_dim()).map(|d| (d.to_string(), k.simplices(d).to_vec())).collect();
        let weights = (0..=k.top_dim()).map(|d| (d.to_string(), w.dim(d).to_vec())).collect();
        ComplexFile { top_dim: k.top_dim(), simplices, weights: Some(weights) }
    }

    pub fn into_parts(self) -> Result<(SimplicialComplex, WeightSystem)> {
        let mut lists = Vec::with_capacity(self.top_dim + 1);
        for d in 0..=self.top_dim {
            lists.push(self.simplices.get(&d.to_string()).cloned().unwrap_or_default());
        }
        if let Some(extra) = self.simplices.keys().find(|key| key.parse::<usize>().map_or(true, |d| d > self.top_dim)) {
            return Err(Error::InvalidInput(format!("unexpected simplex dimension key {extra:?}")));
        }
        let k = SimplicialComplex::new(lists)?;
        if k.top_dim() != self.top_dim {
            return Err(Error::InvalidInput(format!(
                "top_dim {} but the highest nonempty dimension is {}",
                self.top_dim,
                k.top_dim()
            )));
        }
        let w = match self.weights {
            None => WeightSystem::uniform(&k),
            Some(map) => {
                let arrays =
                    (0..=k.top_dim()).map(|d| map.get(&d.to_string()).cloned().unwrap_or_default()).collect();
                WeightSystem::new(&k, arrays)?
            }
        };
        Ok((k, w))
    }
}

pub fn read_complex(path: impl AsRef<Path>) -> Result<(SimplicialComplex, WeightSystem)> {
    let text = std::fs::read_to_string(path)?;
    parse_complex(&text)
}

pub fn parse_complex(text: &str) -> Result<(SimplicialComplex, WeightSystem)> {
    let file: ComplexFile = serde_json::from_str(text)?;
    file.into_parts()
}

pub fn complex_to_json(k: &SimplicialComplex, w: &WeightSystem) -> String {
    serde_json::to_string_pretty(&ComplexFile::from_parts(k, w)).expect("complex serializes")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let text = r#"{"top_dim": 1,
            "simplices": {"0": [[0],[1],[2]], "1": [[0,1],[0,2],[1,2]]},
            "weights": {"0": [0.5, 0.5, 1.0], "1": [1, 2, 3]}}"#;
        let (k, w) = parse_complex(text).unwrap();
        assert_eq!(k.counts(), vec![3, 3]);
        assert_eq!(w.dim(1), &[1.0, 2.0, 3.0]);
        let (k2, w2) = parse_complex(&complex_to_json(&k, &w)).unwrap();
        assert_eq!(k2.lists(), k.lists());
        assert_eq!(w2, w);
    }

    #[test]
    fn weights_default_to_unit() {
        let (_, w) = parse_complex(r#"{"top_dim":0,"simplices":{"0":[[3],[7]]}}"#).unwrap();
        assert_eq!(w.dim(0), &[1.0, 1.0]);
    }

    #[test]
    fn missing_face_in_file() {
        let err = parse_complex(r#"{"top_dim":1,"simplices":{"0":[[1]],"1":[[1,2]]}}"#).unwrap_err();
        assert_eq!(err.name(), "MissingFace");
    }
}

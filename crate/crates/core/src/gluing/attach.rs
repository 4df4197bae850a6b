use std::collections::{BTreeMap, HashSet};

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::complex::{Simplex, SimplicialComplex, WeightSystem};
use crate::error::{Error, Result};

/// Footprint and strength of one thin handle.
///
/// Each site pairs a simplex of the base with a simplex of the attached part,
/// both given as vertex tuples in the order the connector should follow.
/// `profile` holds one nonnegative multiplier per site and sums to 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttachmentSpec {
    pub sites: Vec<(Vec<usize>, Vec<usize>)>,
    pub eps: f64,
    pub profile: Vec<f64>,
}

impl AttachmentSpec {
    pub fn new(sites: Vec<(Vec<usize>, Vec<usize>)>, eps: f64, profile: Vec<f64>) -> Result<Self> {
        let spec = AttachmentSpec { sites, eps, profile };
        spec.validate()?;
        Ok(spec)
    }

    /// Single site with the whole profile on it.
    pub fn single(base: Vec<usize>, part: Vec<usize>, eps: f64) -> Result<Self> {
        AttachmentSpec::new(vec![(base, part)], eps, vec![1.0])
    }

    pub fn with_eps(&self, eps: f64) -> Self {
        AttachmentSpec { eps, ..self.clone() }
    }

    pub fn validate(&self) -> Result<()> {
        for (b, p) in &self.sites {
            if b.len() != p.len() || b.is_empty() {
                return Err(Error::SiteDimensionMismatch { base: b.clone(), part: p.clone() });
            }
        }
        if self.profile.len() != self.sites.len() {
            return Err(Error::InvalidAttachment(format!(
                "{} profile entries for {} sites",
                self.profile.len(),
                self.sites.len()
            )));
        }
        if self.profile.iter().any(|r| !(r.is_finite() && *r >= 0.0)) {
            return Err(Error::InvalidAttachment("profile entries must be nonnegative".into()));
        }
        let total: f64 = self.profile.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidAttachment(format!("profile sums to {total}, not 1")));
        }
        if !(self.eps.is_finite() && self.eps >= 0.0) {
            return Err(Error::InvalidAttachment(format!("coupling {} must be nonnegative", self.eps)));
        }
        Ok(())
    }
}

/// A complex with weights, borrowed.
pub type Weighted<'a> = (&'a SimplicialComplex, &'a WeightSystem);

/// Result of [`attach`]: the glued complex and where each part landed in it.
#[derive(Clone, Debug)]
pub struct Glued {
    pub complex: SimplicialComplex,
    pub weights: WeightSystem,
    /// Vertex label offset applied to each part.
    pub offsets: Vec<usize>,
    /// For each part and dimension, the glued index of every part simplex.
    part_index: Vec<Vec<Vec<usize>>>,
}

impl Glued {
    /// Index in the glued complex of simplex `i` of dimension `dim` of part `part`.
    pub fn part_simplex(&self, part: usize, dim: usize, i: usize) -> usize {
        self.part_index[part][dim][i]
    }

    /// Extends a vector given on a part (in any per-simplex coordinates) by zero
    /// to the whole glued complex.
    pub fn embed_part(&self, part: usize, dim: usize, v: &DVector<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(self.complex.count(dim));
        for (i, &j) in self.part_index[part][dim].iter().enumerate() {
            out[j] = v[i];
        }
        out
    }

    /// Extends a vector given on the base by zero.
    pub fn embed_base(&self, dim: usize, v: &DVector<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(self.complex.count(dim));
        out.rows_mut(0, v.len()).copy_from(v);
        out
    }
}

fn site_index(k: &SimplicialComplex, site: &[usize], what: &str) -> Result<usize> {
    let mut sorted = site.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidAttachment(format!("{what} site {site:?} repeats a vertex")));
    }
    k.index_of(&sorted)
        .ok_or_else(|| Error::InvalidAttachment(format!("{what} site {site:?} is not a simplex")))
}

/// Local weight scale of dimension `k` around a site: the mean weight of the
/// `k`-simplices touching any site vertex, falling back to the site weight.
fn local_scale(c: &SimplicialComplex, w: &WeightSystem, site: &[usize], site_weight: f64, k: usize) -> f64 {
    let incident = c.incident(k, site);
    if incident.is_empty() {
        return site_weight;
    }
    let ws = w.dim(k);
    incident.iter().map(|&i| ws[i]).sum::<f64>() / incident.len() as f64
}

/// Glues every part to the base through connector simplices.
///
/// Parts are relabelled past the largest label used so far. For a site pair
/// `(s, t)` of dimension `j` the connector is the staircase prism with top
/// simplices `{s_0..s_i, t_i..t_j}`, `i = 0..=j`. Each new `k`-simplex receives
/// `eps^(j + 2 - k) * rho(site) * g_k`, where `g_k` is the geometric mean of the
/// local `k`-weight scales at the two sites; contributions of several sites to
/// one simplex add up. With `eps = 0` no connector is built.
///
/// Simplices are ordered base first, then each part, then the connectors
/// sorted lexicographically per dimension.
pub fn attach(base: Weighted<'_>, parts: &[(Weighted<'_>, &AttachmentSpec)]) -> Result<Glued> {
    let (bk, bw) = base;
    bw.check(bk)?;
    let mut offset = bk.max_vertex().map_or(0, |v| v + 1);
    let mut lists: Vec<Vec<Simplex>> = bk.lists().to_vec();
    let mut weights: Vec<Vec<f64>> = bw.all().to_vec();
    let mut offsets = Vec::with_capacity(parts.len());
    let mut connectors: Vec<BTreeMap<Simplex, f64>> = Vec::new();

    let grow = |lists: &mut Vec<Vec<Simplex>>, weights: &mut Vec<Vec<f64>>, d: usize| {
        while lists.len() <= d {
            lists.push(Vec::new());
            weights.push(Vec::new());
        }
    };

    for &((pk, pw), spec) in parts {
        spec.validate()?;
        pw.check(pk)?;
        offsets.push(offset);
        for d in 0..=pk.top_dim() {
            grow(&mut lists, &mut weights, d);
            lists[d].extend(pk.simplices(d).iter().map(|s| s.iter().map(|v| v + offset).collect::<Simplex>()));
            weights[d].extend_from_slice(pw.dim(d));
        }

        for ((bs, ps), &rho) in spec.sites.iter().zip(&spec.profile) {
            let j = bs.len() - 1;
            let bi = site_index(bk, bs, "base")?;
            let pi = site_index(pk, ps, "part")?;
            if spec.eps == 0.0 || rho == 0.0 {
                continue;
            }
            let (bsw, psw) = (bw.dim(j)[bi], pw.dim(j)[pi]);
            let shifted: Vec<usize> = ps.iter().map(|v| v + offset).collect();
            let scales: Vec<f64> = (0..=j + 1)
                .map(|k| (local_scale(bk, bw, bs, bsw, k) * local_scale(pk, pw, ps, psw, k)).sqrt())
                .collect();
            let part_set: HashSet<usize> = shifted.iter().copied().collect();
            let mut seen: HashSet<Simplex> = HashSet::new();
            for i in 0..=j {
                let top: Vec<usize> = bs[..=i].iter().chain(&shifted[i..]).copied().collect();
                for_each_face(&top, |face| {
                    let k = face.len() - 1;
                    let mixed = face.iter().any(|v| part_set.contains(v)) && face.iter().any(|v| !part_set.contains(v));
                    if k >= 1 && mixed && seen.insert(face.to_vec()) {
                        if connectors.len() <= k {
                            connectors.resize_with(k + 1, BTreeMap::new);
                        }
                        let add = spec.eps.powi((j + 2 - k) as i32) * rho * scales[k];
                        *connectors[k].entry(face.to_vec()).or_insert(0.0) += add;
                    }
                });
            }
        }
        offset += pk.max_vertex().map_or(0, |v| v + 1);
    }

    for (k, map) in connectors.into_iter().enumerate() {
        if map.is_empty() {
            continue;
        }
        grow(&mut lists, &mut weights, k);
        for (s, w) in map {
            lists[k].push(s);
            weights[k].push(w);
        }
    }

    let complex = SimplicialComplex::new(lists)?;
    let weights = WeightSystem::new(&complex, weights)?;
    let part_index = parts
        .iter()
        .zip(&offsets)
        .map(|(&((pk, _), _), &off)| {
            (0..=pk.top_dim())
                .map(|d| {
                    pk.simplices(d)
                        .iter()
                        .map(|s| {
                            let t: Simplex = s.iter().map(|v| v + off).collect();
                            complex.index_of(&t).expect("part simplex present")
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    Ok(Glued { complex, weights, offsets, part_index })
}

/// Every nonempty subset of a sorted-after-call vertex tuple, as sorted tuples.
fn for_each_face(top: &[usize], mut f: impl FnMut(&[usize])) {
    let mut sorted = top.to_vec();
    sorted.sort_unstable();
    let n = sorted.len();
    let mut buf = Vec::with_capacity(n);
    for mask in 1u32..(1u32 << n) {
        buf.clear();
        buf.extend((0..n).filter(|i| mask & (1 << i) != 0).map(|i| sorted[i]));
        f(&buf);
    }
}

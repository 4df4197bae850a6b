use std::collections::{BTreeSet, HashMap, HashSet};

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// An oriented simplex: a strictly increasing tuple of vertex labels.
pub type Simplex = Vec<usize>;

/// Oriented simplices by dimension together with their signed boundary incidence.
///
/// Simplex lists keep the order they were given in, so weight arrays can be
/// aligned positionally with them. Incidence signs follow the alternating face
/// formula: removing the vertex in position `i` contributes `(-1)^i`.
#[derive(Clone, Debug)]
pub struct SimplicialComplex {
    simplices: Vec<Vec<Simplex>>,
    index: Vec<HashMap<Simplex, usize>>,
    faces: Vec<Vec<Vec<(usize, i8)>>>,
}

impl SimplicialComplex {
    /// Builds and validates a complex from explicit per-dimension simplex lists.
    ///
    /// Trailing empty dimensions are dropped. Fails on unsorted tuples,
    /// duplicates, missing faces, or a nonzero double boundary.
    pub fn new(mut lists: Vec<Vec<Simplex>>) -> Result<Self> {
        while lists.len() > 1 && lists.last().is_some_and(|l| l.is_empty()) {
            lists.pop();
        }
        if lists.is_empty() {
            lists.push(Vec::new());
        }
        let mut index: Vec<HashMap<Simplex, usize>> = Vec::with_capacity(lists.len());
        for (dim, list) in lists.iter().enumerate() {
            let mut map = HashMap::with_capacity(list.len());
            for s in list {
                if s.len() != dim + 1 {
                    return Err(Error::MalformedSimplex { simplex: s.clone(), dim });
                }
                if s.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::OrientationError(s.clone()));
                }
                if map.insert(s.clone(), map.len()).is_some() {
                    return Err(Error::DuplicateSimplex(s.clone()));
                }
            }
            index.push(map);
        }

        let mut faces = vec![Vec::new(); lists.len()];
        faces[0] = vec![Vec::new(); lists[0].len()];
        for dim in 1..lists.len() {
            let mut dim_faces = Vec::with_capacity(lists[dim].len());
            for s in &lists[dim] {
                let mut fs = Vec::with_capacity(dim + 1);
                for i in 0..=dim {
                    let face = face_without(s, i);
                    let Some(&fi) = index[dim - 1].get(&face) else {
                        return Err(Error::MissingFace { simplex: s.clone(), face });
                    };
                    fs.push((fi, if i % 2 == 0 { 1 } else { -1 }));
                }
                dim_faces.push(fs);
            }
            faces[dim] = dim_faces;
        }

        let complex = SimplicialComplex { simplices: lists, index, faces };
        complex.check_nilpotent()?;
        Ok(complex)
    }

    /// Builds the closure of a list of facets, each given as an unordered vertex
    /// set. Simplices of every dimension are sorted lexicographically.
    pub fn from_facets(facets: &[Vec<usize>]) -> Result<Self> {
        let mut by_dim: Vec<BTreeSet<Simplex>> = Vec::new();
        for facet in facets {
            let mut f = facet.clone();
            f.sort_unstable();
            if f.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::OrientationError(facet.clone()));
            }
            for_each_subset(&f, |sub| {
                let d = sub.len() - 1;
                if by_dim.len() <= d {
                    by_dim.resize_with(d + 1, BTreeSet::new);
                }
                by_dim[d].insert(sub.to_vec());
            });
        }
        SimplicialComplex::new(by_dim.into_iter().map(|s| s.into_iter().collect()).collect())
    }

    fn check_nilpotent(&self) -> Result<()> {
        for dim in 2..self.simplices.len() {
            for fs in &self.faces[dim] {
                let mut acc: HashMap<usize, i64> = HashMap::new();
                for &(f, s) in fs {
                    for &(g, t) in &self.faces[dim - 1][f] {
                        *acc.entry(g).or_default() += i64::from(s) * i64::from(t);
                    }
                }
                if acc.values().any(|&v| v != 0) {
                    return Err(Error::BoundaryNotNilpotent(dim));
                }
            }
        }
        Ok(())
    }

    pub fn top_dim(&self) -> usize {
        self.simplices.len() - 1
    }

    /// Number of simplices of dimension `dim` (zero above the top dimension).
    pub fn count(&self, dim: usize) -> usize {
        self.simplices.get(dim).map_or(0, Vec::len)
    }

    pub fn counts(&self) -> Vec<usize> {
        self.simplices.iter().map(Vec::len).collect()
    }

    pub fn simplices(&self, dim: usize) -> &[Simplex] {
        self.simplices.get(dim).map_or(&[], |v| v.as_slice())
    }

    pub fn index_of(&self, simplex: &[usize]) -> Option<usize> {
        let dim = simplex.len().checked_sub(1)?;
        self.index.get(dim)?.get(simplex).copied()
    }

    /// Signed faces `(index, sign)` of simplex `i` in dimension `dim`.
    pub fn faces(&self, dim: usize, i: usize) -> &[(usize, i8)] {
        &self.faces[dim][i]
    }

    pub fn max_vertex(&self) -> Option<usize> {
        self.simplices[0].iter().map(|v| v[0]).max()
    }

    /// Integer coboundary `d_p : C^p -> C^{p+1}` as a dense matrix with
    /// `count(p+1)` rows and `count(p)` columns.
    pub fn coboundary(&self, p: usize) -> DMatrix<f64> {
        let rows = self.count(p + 1);
        let mut d = DMatrix::zeros(rows, self.count(p));
        for r in 0..rows {
            for &(c, s) in &self.faces[p + 1][r] {
                d[(r, c)] += f64::from(s);
            }
        }
        d
    }

    /// Every simplex that contains at least one of `vertices`, per dimension.
    pub fn incident(&self, dim: usize, vertices: &[usize]) -> Vec<usize> {
        let set: HashSet<usize> = vertices.iter().copied().collect();
        self.simplices(dim)
            .iter()
            .enumerate()
            .filter(|(_, s)| s.iter().any(|v| set.contains(v)))
            .map(|(i, _)| i)
            .collect()
    }

    /// Same complex with every vertex label shifted by `offset`.
    pub fn relabeled(&self, offset: usize) -> SimplicialComplex {
        let lists = self
            .simplices
            .iter()
            .map(|l| l.iter().map(|s| s.iter().map(|v| v + offset).collect()).collect())
            .collect();
        // relabelling by a constant preserves order, faces and signs
        SimplicialComplex::new(lists).expect("relabelling preserves validity")
    }

    pub fn lists(&self) -> &[Vec<Simplex>] {
        &self.simplices
    }
}

/// The face of `s` obtained by deleting the vertex in position `i`.
pub fn face_without(s: &[usize], i: usize) -> Simplex {
    s.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &v)| v).collect()
}

/// Sorts a vertex tuple and returns the sign of the sorting permutation, or
/// `None` when two entries coincide.
pub fn sort_with_sign(tuple: &[usize]) -> Option<(Simplex, i8)> {
    let mut v = tuple.to_vec();
    let mut sign = 1i8;
    // insertion sort, counting transpositions
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some((v, sign))
    }
}

fn for_each_subset(sorted: &[usize], mut f: impl FnMut(&[usize])) {
    let n = sorted.len();
    let mut buf = Vec::with_capacity(n);
    for mask in 1u64..(1u64 << n) {
        buf.clear();
        for (i, &v) in sorted.iter().enumerate() {
            if mask & (1 << i) != 0 {
                buf.push(v);
            }
        }
        f(&buf);
    }
}

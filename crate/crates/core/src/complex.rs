//! 2-complexes with complete 1-skeleton.

use std::fs;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Rank of a vertex pair `i < j` in lexicographic order over all `C(n, 2)` pairs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EdgeIndex(pub usize);

/// Rank of a vertex triple `i < j < k` in lexicographic order over all `C(n, 3)` triples.
///
/// Ranks enumerate every triangle of the full simplex, whether or not it is a
/// face of a given complex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TriangleIndex(pub usize);

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

pub fn edge_count(n: usize) -> usize {
    binomial(n, 2)
}

pub fn triangle_count(n: usize) -> usize {
    binomial(n, 3)
}

impl EdgeIndex {
    pub fn from_vertices(n: usize, i: usize, j: usize) -> Self {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        debug_assert!(i != j && j < n);
        EdgeIndex(binomial(n, 2) - binomial(n - i, 2) + (j - i - 1))
    }

    pub fn vertices(self, n: usize) -> (usize, usize) {
        let mut rest = self.0;
        for i in 0..n {
            let row = n - 1 - i;
            if rest < row {
                return (i, i + 1 + rest);
            }
            rest -= row;
        }
        panic!("edge rank {} out of range for n = {n}", self.0);
    }
}

impl TriangleIndex {
    pub fn from_vertices(n: usize, [i, j, k]: [usize; 3]) -> Self {
        debug_assert!(i < j && j < k && k < n);
        let before_i = binomial(n, 3) - binomial(n - i, 3);
        let before_j = binomial(n - i - 1, 2) - binomial(n - j, 2);
        TriangleIndex(before_i + before_j + (k - j - 1))
    }

    pub fn vertices(self, n: usize) -> [usize; 3] {
        let mut rest = self.0;
        for i in 0..n {
            let block = binomial(n - 1 - i, 2);
            if rest < block {
                for j in i + 1..n {
                    let row = n - 1 - j;
                    if rest < row {
                        return [i, j, j + 1 + rest];
                    }
                    rest -= row;
                }
            }
            rest -= block;
        }
        panic!("triangle rank {} out of range for n = {n}", self.0);
    }

    /// The three edges `(a,b)`, `(a,c)`, `(b,c)` of the triangle `a < b < c`.
    pub fn edges(self, n: usize) -> [EdgeIndex; 3] {
        let [a, b, c] = self.vertices(n);
        [
            EdgeIndex::from_vertices(n, a, b),
            EdgeIndex::from_vertices(n, a, c),
            EdgeIndex::from_vertices(n, b, c),
        ]
    }
}

/// All sorted triples of `0..n` in lexicographic (= rank) order.
pub fn all_triangles(n: usize) -> impl Iterator<Item = [usize; 3]> {
    (0..n).flat_map(move |i| {
        (i + 1..n).flat_map(move |j| (j + 1..n).map(move |k| [i, j, k]))
    })
}

/// All sorted pairs of `0..n` in lexicographic (= rank) order.
pub fn all_edges(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
}

/// A 2-dimensional complex on `n` vertices whose 1-skeleton is complete.
///
/// Faces are kept as a sorted list of triples together with a membership
/// bitset over [`TriangleIndex`]. The value is immutable once built.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Complex2 {
    n: usize,
    faces: Vec<[usize; 3]>,
    member: Vec<u64>,
}

#[derive(Serialize, Deserialize)]
struct ComplexFile {
    n: usize,
    faces: Vec<[usize; 3]>,
}

impl Complex2 {
    /// Builds a complex from an arbitrary list of triples. Each triple is
    /// sorted; duplicates and out-of-range vertices are rejected.
    pub fn from_faces(n: usize, faces: impl IntoIterator<Item = [usize; 3]>) -> Result<Self> {
        check_vertex_count(n)?;
        let mut list = Vec::new();
        for mut t in faces {
            t.sort_unstable();
            if t[0] == t[1] || t[1] == t[2] || t[2] >= n {
                return Err(Error::InvalidParameter(format!("bad face {t:?} for n = {n}")));
            }
            list.push(t);
        }
        list.sort_unstable();
        if list.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidParameter("duplicate face".into()));
        }
        Ok(Self::from_sorted(n, list))
    }

    fn from_sorted(n: usize, faces: Vec<[usize; 3]>) -> Self {
        let mut member = vec![0u64; triangle_count(n).div_ceil(64)];
        for &t in &faces {
            let r = TriangleIndex::from_vertices(n, t).0;
            member[r / 64] |= 1 << (r % 64);
        }
        Self { n, faces, member }
    }

    /// The full 2-skeleton of the simplex on `n` vertices.
    pub fn new_complete(n: usize) -> Result<Self> {
        check_vertex_count(n)?;
        Ok(Self::from_sorted(n, all_triangles(n).collect()))
    }

    /// The complete graph with no 2-faces.
    pub fn new_faceless(n: usize) -> Result<Self> {
        check_vertex_count(n)?;
        Ok(Self::from_sorted(n, Vec::new()))
    }

    /// Draws from the Linial–Meshulam model `Y(n, p)`.
    ///
    /// Exactly one uniform `f64` is consumed per triple, in lexicographic
    /// order, and the triple is kept when the draw is below `p`.
    pub fn sample_lm<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Result<Self> {
        check_vertex_count(n)?;
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter(format!("p = {p} is not in [0, 1]")));
        }
        let faces = all_triangles(n).filter(|_| rng.gen::<f64>() < p).collect();
        Ok(Self::from_sorted(n, faces))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn edge_count(&self) -> usize {
        edge_count(self.n)
    }

    pub fn triangle_count(&self) -> usize {
        triangle_count(self.n)
    }

    pub fn face_indices(&self) -> impl Iterator<Item = TriangleIndex> + '_ {
        self.faces.iter().map(|&t| TriangleIndex::from_vertices(self.n, t))
    }

    pub fn contains(&self, t: TriangleIndex) -> bool {
        self.member[t.0 / 64] >> (t.0 % 64) & 1 == 1
    }

    pub fn contains_vertices(&self, t: [usize; 3]) -> bool {
        self.contains(TriangleIndex::from_vertices(self.n, t))
    }

    /// Position of a face in [`Complex2::faces`], if present.
    pub fn face_position(&self, t: TriangleIndex) -> Option<usize> {
        let v = t.vertices(self.n);
        self.faces.binary_search(&v).ok()
    }

    /// Returns a copy with one more face.
    pub fn with_face(&self, t: [usize; 3]) -> Result<Self> {
        Self::from_faces(self.n, self.faces.iter().copied().chain([t]))
    }

    /// Returns a copy with `t` removed (no-op when absent).
    pub fn without_face(&self, t: [usize; 3]) -> Result<Self> {
        let mut t = t;
        t.sort_unstable();
        Ok(Self::from_sorted(
            self.n,
            self.faces.iter().copied().filter(|&f| f != t).collect(),
        ))
    }

    /// Number of faces containing edge `e`.
    pub fn edge_degree(&self, e: EdgeIndex) -> usize {
        let (a, b) = e.vertices(self.n);
        (0..self.n)
            .filter(|&c| c != a && c != b)
            .filter(|&c| {
                let mut t = [a, b, c];
                t.sort_unstable();
                self.contains_vertices(t)
            })
            .count()
    }

    /// Degrees of all edges in [`EdgeIndex`] order.
    pub fn edge_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.edge_count()];
        for f in self.face_indices() {
            for e in f.edges(self.n) {
                deg[e.0] += 1;
            }
        }
        deg
    }

    pub fn min_edge_degree(&self) -> usize {
        self.edge_degrees().into_iter().min().unwrap_or(0)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&ComplexFile { n: self.n, faces: self.faces.clone() })?)
    }

    /// Parses the `{"n": .., "faces": [[i,j,k], ..]}` format. Triples must be
    /// strictly increasing and the list strictly lexicographically sorted.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: ComplexFile = serde_json::from_str(text)?;
        check_vertex_count(file.n).map_err(|e| Error::Format(e.to_string()))?;
        for t in &file.faces {
            if !(t[0] < t[1] && t[1] < t[2]) {
                return Err(Error::Format(format!("face {t:?} is not strictly increasing")));
            }
            if t[2] >= file.n {
                return Err(Error::Format(format!("face {t:?} out of range for n = {}", file.n)));
            }
        }
        if file.faces.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Format("face list is not strictly sorted".into()));
        }
        Ok(Self::from_sorted(file.n, file.faces))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_json()?)?;
        Ok(())
    }
}

fn check_vertex_count(n: usize) -> Result<()> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!("need n >= 3, got {n}")));
    }
    Ok(())
}

//! GF(2) chains on a 2-complex and exact minimum-weight fillings.
//!
//! For a 1-cycle `z`, `Fill(z)` is the least number of faces whose mod-2
//! boundary is `z`. [`FillSolver`] computes it exactly: it factors the
//! boundary map once per complex, then for each cycle either exhausts the
//! solution coset (small kernel) or runs a branch-and-bound over face
//! inclusion. [`fill_bruteforce`] is the independent subset-enumeration
//! oracle.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complex::{edge_count, Complex2, EdgeIndex, TriangleIndex};
use crate::error::{Error, Result};
use crate::gf2::{BitRow, Elimination, Gf2Matrix};

/// Kernel dimensions up to this bound are solved by exhausting the coset.
pub const COSET_EXHAUSTION_MAX_KERNEL: usize = 24;

/// A GF(2) 1-chain, stored as its support.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Chain1 {
    support: BTreeSet<EdgeIndex>,
}

impl Chain1 {
    pub fn new(support: impl IntoIterator<Item = EdgeIndex>) -> Self {
        let mut chain = Self::default();
        for e in support {
            chain.toggle(e);
        }
        chain
    }

    pub fn support(&self) -> &BTreeSet<EdgeIndex> {
        &self.support
    }

    /// Hamming norm.
    pub fn norm(&self) -> usize {
        self.support.len()
    }

    pub fn is_zero(&self) -> bool {
        self.support.is_empty()
    }

    pub fn toggle(&mut self, e: EdgeIndex) {
        if !self.support.remove(&e) {
            self.support.insert(e);
        }
    }

    /// Sum over GF(2).
    pub fn add(&self, other: &Chain1) -> Chain1 {
        Chain1 { support: self.support.symmetric_difference(&other.support).copied().collect() }
    }

    pub fn to_bits(&self, n: usize) -> BitRow {
        BitRow::from_ones(edge_count(n), self.support.iter().map(|e| e.0))
    }

    pub fn from_bits(bits: &BitRow) -> Self {
        Chain1 { support: bits.iter_ones().map(EdgeIndex).collect() }
    }
}

/// A GF(2) 2-chain, stored as its support of triangles.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Chain2 {
    support: BTreeSet<TriangleIndex>,
}

impl Chain2 {
    pub fn new(support: impl IntoIterator<Item = TriangleIndex>) -> Self {
        let mut chain = Self::default();
        for t in support {
            chain.toggle(t);
        }
        chain
    }

    pub fn from_vertices(n: usize, faces: impl IntoIterator<Item = [usize; 3]>) -> Self {
        Self::new(faces.into_iter().map(|t| TriangleIndex::from_vertices(n, t)))
    }

    pub fn support(&self) -> &BTreeSet<TriangleIndex> {
        &self.support
    }

    pub fn norm(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn toggle(&mut self, t: TriangleIndex) {
        if !self.support.remove(&t) {
            self.support.insert(t);
        }
    }

    pub fn contains(&self, t: TriangleIndex) -> bool {
        self.support.contains(&t)
    }

    pub fn add(&self, other: &Chain2) -> Chain2 {
        Chain2 { support: self.support.symmetric_difference(&other.support).copied().collect() }
    }

    pub fn boundary(&self, n: usize) -> Chain1 {
        Chain1::new(self.support.iter().flat_map(|t| t.edges(n)))
    }

    pub fn is_subset_of(&self, other: &Chain2) -> bool {
        self.support.is_subset(&other.support)
    }
}

/// A 1-chain with zero boundary.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Cycle1(Chain1);

impl Cycle1 {
    pub fn new(n: usize, chain: Chain1) -> Result<Self> {
        if !is_cycle(n, &chain) {
            return Err(Error::ContractViolation("chain has nonzero boundary".into()));
        }
        Ok(Cycle1(chain))
    }

    pub fn zero() -> Self {
        Cycle1(Chain1::default())
    }

    pub fn chain(&self) -> &Chain1 {
        &self.0
    }

    pub fn add(&self, other: &Cycle1) -> Cycle1 {
        Cycle1(self.0.add(&other.0))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FillStatus {
    Feasible,
    Infeasible,
}

/// Outcome of a filling computation.
///
/// When `certified` is set and the status is feasible, `witness` is a chain
/// of exactly `size` faces with boundary equal to the input cycle, and no
/// smaller chain exists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FillResult {
    pub status: FillStatus,
    pub size: Option<usize>,
    pub witness: Option<Chain2>,
    pub certified: bool,
}

impl FillResult {
    fn infeasible() -> Self {
        Self { status: FillStatus::Infeasible, size: None, witness: None, certified: true }
    }

    fn optimal(witness: Chain2) -> Self {
        Self {
            status: FillStatus::Feasible,
            size: Some(witness.norm()),
            witness: Some(witness),
            certified: true,
        }
    }

    pub fn is_feasible(&self) -> bool {
        self.status == FillStatus::Feasible
    }
}

/// GF(2) boundary matrix `∂_k` for `k ∈ {1, 2}`.
///
/// `∂_2` has one row per edge and one column per face of `x`; `∂_1` has one
/// row per vertex and one column per edge.
pub fn boundary_matrix_gf2(x: &Complex2, k: usize) -> Result<Gf2Matrix> {
    let n = x.n();
    match k {
        1 => {
            let mut m = Gf2Matrix::zeros(n, x.edge_count());
            for e in 0..x.edge_count() {
                let (a, b) = EdgeIndex(e).vertices(n);
                m.set(a, e, true);
                m.set(b, e, true);
            }
            Ok(m)
        }
        2 => {
            let mut m = Gf2Matrix::zeros(x.edge_count(), x.face_count());
            for (c, t) in x.face_indices().enumerate() {
                for e in t.edges(n) {
                    m.set(e.0, c, true);
                }
            }
            Ok(m)
        }
        _ => Err(Error::InvalidParameter(format!("boundary dimension {k} not in {{1, 2}}"))),
    }
}

pub fn triangle_boundary(n: usize, t: TriangleIndex) -> Cycle1 {
    Cycle1(Chain1::new(t.edges(n)))
}

/// True when every vertex meets an even number of edges of `y`.
pub fn is_cycle(n: usize, y: &Chain1) -> bool {
    let mut parity = vec![false; n];
    for e in y.support() {
        let (a, b) = e.vertices(n);
        parity[a] ^= true;
        parity[b] ^= true;
    }
    parity.iter().all(|&p| !p)
}

/// True when every edge lies in an even number of triangles of `c`.
pub fn is_two_cycle(n: usize, c: &Chain2) -> bool {
    c.boundary(n).is_zero()
}

/// Fewest faces that can have a boundary of weight `w`.
///
/// Each face changes three edges, and a chain of `k` faces has boundary
/// weight congruent to `k` mod 2.
fn weight_lower_bound(w: usize) -> usize {
    let k = w.div_ceil(3);
    if k % 2 == w % 2 {
        k
    } else {
        k + 1
    }
}

fn face_boundaries(x: &Complex2) -> Vec<BitRow> {
    let n = x.n();
    x.face_indices()
        .map(|t| BitRow::from_ones(x.edge_count(), t.edges(n).map(|e| e.0)))
        .collect()
}

fn chain_from_columns(x: &Complex2, cols: impl IntoIterator<Item = usize>) -> Chain2 {
    Chain2::from_vertices(x.n(), cols.into_iter().map(|c| x.faces()[c]))
}

/// Subset-enumeration oracle for `Fill_X(z)`.
///
/// Tries every face subset of size `0, 1, ..., max_size` in turn, so the
/// first hit is optimal. Feasibility is decided by comparing the GF(2) rank
/// of `∂_2` with and without `z` appended. A feasible cycle whose optimum
/// exceeds `max_size` yields a feasible, uncertified result without size or
/// witness.
pub fn fill_bruteforce(x: &Complex2, z: &Cycle1, max_size: usize) -> FillResult {
    let target = z.chain().to_bits(x.n());
    if target.is_zero() {
        return FillResult::optimal(Chain2::default());
    }
    let d2 = boundary_matrix_gf2(x, 2).expect("dimension 2 is valid");
    if d2.augment(&target).rank() > d2.rank() {
        return FillResult::infeasible();
    }
    let columns = face_boundaries(x);

    fn search(
        columns: &[BitRow],
        start: usize,
        left: usize,
        acc: &BitRow,
        target: &BitRow,
        picked: &mut Vec<usize>,
    ) -> bool {
        if left == 0 {
            return acc == target;
        }
        for c in start..=columns.len().saturating_sub(left) {
            let mut next = acc.clone();
            next.xor_assign(&columns[c]);
            picked.push(c);
            if search(columns, c + 1, left - 1, &next, target, picked) {
                return true;
            }
            picked.pop();
        }
        false
    }

    let zero = BitRow::zeros(target.len());
    for size in 1..=max_size.min(columns.len()) {
        let mut picked = Vec::with_capacity(size);
        if search(&columns, 0, size, &zero, &target, &mut picked) {
            return FillResult::optimal(chain_from_columns(x, picked));
        }
    }
    FillResult { status: FillStatus::Feasible, size: None, witness: None, certified: false }
}

/// Exact minimum-weight filling, see [`FillSolver`].
pub fn fill_exact(x: &Complex2, z: &Cycle1) -> FillResult {
    FillSolver::new(x).fill(z)
}

/// Exact `Fill_X` solver for one complex.
///
/// The boundary map is reduced once; each query then costs one
/// matrix-vector product for feasibility plus the optimization.
pub struct FillSolver<'a> {
    complex: &'a Complex2,
    elimination: Elimination,
    kernel: Vec<BitRow>,
    boundaries: Vec<BitRow>,
    /// Face columns containing each edge, in column order.
    edge_faces: Vec<Vec<usize>>,
}

impl<'a> FillSolver<'a> {
    pub fn new(complex: &'a Complex2) -> Self {
        let d2 = boundary_matrix_gf2(complex, 2).expect("dimension 2 is valid");
        let elimination = Elimination::new(&d2);
        let kernel = elimination.kernel_basis();
        let boundaries = face_boundaries(complex);
        let mut edge_faces = vec![Vec::new(); complex.edge_count()];
        for (c, b) in boundaries.iter().enumerate() {
            for e in b.iter_ones() {
                edge_faces[e].push(c);
            }
        }
        Self { complex, elimination, kernel, boundaries, edge_faces }
    }

    pub fn complex(&self) -> &Complex2 {
        self.complex
    }

    /// Dimension of the space of 2-cycles of the complex.
    pub fn kernel_dim(&self) -> usize {
        self.kernel.len()
    }

    pub fn fill_triangle(&self, t: TriangleIndex) -> FillResult {
        self.fill(&triangle_boundary(self.complex.n(), t))
    }

    pub fn fill(&self, z: &Cycle1) -> FillResult {
        let target = z.chain().to_bits(self.complex.n());
        let Some(particular) = self.elimination.solve(&target) else {
            return FillResult::infeasible();
        };
        let floor = weight_lower_bound(target.count_ones());
        if floor == 0 {
            return FillResult::optimal(Chain2::default());
        }
        if floor == 1 {
            if let Some(c) = self.single_face(&target) {
                return FillResult::optimal(chain_from_columns(self.complex, [c]));
            }
        }
        let best = if self.kernel.len() <= COSET_EXHAUSTION_MAX_KERNEL {
            self.exhaust_coset(particular, floor)
        } else {
            self.branch_and_bound(&target, particular, floor)
        };
        FillResult::optimal(chain_from_columns(self.complex, best.iter_ones()))
    }

    fn single_face(&self, target: &BitRow) -> Option<usize> {
        let e = target.first_one()?;
        self.edge_faces[e].iter().copied().find(|&c| &self.boundaries[c] == target)
    }

    /// Gray-code walk over `particular + span(kernel)`.
    fn exhaust_coset(&self, particular: BitRow, floor: usize) -> BitRow {
        let k = self.kernel.len();
        let mut y = particular.clone();
        let mut best = y.count_ones();
        let mut best_code = 0u64;
        if best > floor {
            for i in 1u64..(1u64 << k) {
                y.xor_assign(&self.kernel[i.trailing_zeros() as usize]);
                let w = y.count_ones();
                if w < best {
                    best = w;
                    best_code = i ^ (i >> 1);
                    if best == floor {
                        break;
                    }
                }
            }
        }
        let mut out = particular;
        for b in 0..k {
            if best_code >> b & 1 == 1 {
                out.xor_assign(&self.kernel[b]);
            }
        }
        out
    }

    fn branch_and_bound(&self, target: &BitRow, particular: BitRow, floor: usize) -> BitRow {
        let start = minimalize_columns(&self.boundaries, particular);
        let mut search = Search {
            solver: self,
            best: start.count_ones(),
            best_set: start.iter_ones().collect(),
            floor,
            picked: Vec::new(),
        };
        if search.best > floor {
            let mut blocked = BitRow::zeros(self.boundaries.len());
            search.descend(target, &mut blocked);
        }
        BitRow::from_ones(self.boundaries.len(), search.best_set)
    }

    /// Whether `r` lies in the span of the boundaries of the unblocked faces.
    fn reachable(&self, r: &BitRow, blocked: &BitRow) -> bool {
        let mut basis: Vec<Option<BitRow>> = vec![None; r.len()];
        let mut reduce = |mut v: BitRow, insert: bool| -> bool {
            while let Some(lead) = v.first_one() {
                match &basis[lead] {
                    Some(b) => v.xor_assign(b),
                    None => {
                        if insert {
                            basis[lead] = Some(v);
                        }
                        return false;
                    }
                }
            }
            true
        };
        for (c, b) in self.boundaries.iter().enumerate() {
            if !blocked.get(c) {
                reduce(b.clone(), true);
            }
        }
        reduce(r.clone(), false)
    }
}

struct Search<'s, 'a> {
    solver: &'s FillSolver<'a>,
    best: usize,
    best_set: Vec<usize>,
    floor: usize,
    picked: Vec<usize>,
}

impl Search<'_, '_> {
    /// Every filling of the residual `r` uses some unblocked face through
    /// each edge of `r`. Branch `i` over the faces through the most
    /// constrained edge takes face `i` and excludes faces `0..i`, so the
    /// branches partition the remaining search space.
    fn descend(&mut self, r: &BitRow, blocked: &mut BitRow) {
        let depth = self.picked.len();
        let w = r.count_ones();
        if w == 0 {
            self.best = depth;
            self.best_set = self.picked.clone();
            return;
        }
        let slack = self.best - depth;
        if weight_lower_bound(w) >= slack {
            return;
        }

        let solver = self.solver;
        let mut edge = None;
        let mut fewest = usize::MAX;
        for e in r.iter_ones() {
            let avail = solver.edge_faces[e].iter().filter(|&&c| !blocked.get(c)).count();
            if avail < fewest {
                fewest = avail;
                edge = Some(e);
                if avail <= 1 {
                    break;
                }
            }
        }
        if fewest == 0 {
            return;
        }
        if weight_lower_bound(w) + 2 < slack && !solver.reachable(r, blocked) {
            return;
        }

        let mut candidates: Vec<(usize, usize)> = solver.edge_faces[edge.unwrap()]
            .iter()
            .filter(|&&c| !blocked.get(c))
            .map(|&c| (solver.boundaries[c].and_count(r), c))
            .collect();
        candidates.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));

        for &(_, c) in &candidates {
            blocked.set(c, true);
            let mut next = r.clone();
            next.xor_assign(&solver.boundaries[c]);
            self.picked.push(c);
            self.descend(&next, blocked);
            self.picked.pop();
            if self.best <= self.floor || self.best <= depth + 1 {
                break;
            }
        }
        for &(_, c) in &candidates {
            blocked.set(c, false);
        }
    }
}

/// Removes 2-cycles from the column set `y` until its columns are
/// independent. The boundary is unchanged.
fn minimalize_columns(boundaries: &[BitRow], mut y: BitRow) -> BitRow {
    loop {
        let cols: Vec<usize> = y.iter_ones().collect();
        if cols.is_empty() {
            return y;
        }
        let rows = boundaries[0].len();
        let sub: Vec<BitRow> = cols.iter().map(|&c| boundaries[c].clone()).collect();
        let kernel = Elimination::new(&Gf2Matrix::from_columns(rows, &sub)).kernel_basis();
        let Some(cycle) = kernel.first() else {
            return y;
        };
        for i in cycle.iter_ones() {
            y.set(cols[i], false);
        }
    }
}

/// Shrinks a filling `y` of `z` to a support-minimal one: the result is a
/// subset of `y`, still fills `z`, and no proper subset of it does.
///
/// A subset of a filling is again a filling exactly when the removed part is
/// a 2-cycle, so 2-cycles inside `y` are stripped until none remain.
pub fn support_minimalize(x: &Complex2, y: &Chain2, z: &Cycle1) -> Result<Chain2> {
    let n = x.n();
    if let Some(t) = y.support().iter().find(|&&t| !x.contains(t)) {
        return Err(Error::ContractViolation(format!("{t:?} is not a face of the complex")));
    }
    if &y.boundary(n) != z.chain() {
        return Err(Error::ContractViolation("chain does not fill the cycle".into()));
    }
    let boundaries = face_boundaries(x);
    let cols = BitRow::from_ones(
        x.face_count(),
        y.support().iter().map(|&t| x.face_position(t).expect("checked above")),
    );
    let kept = minimalize_columns(&boundaries, cols);
    Ok(chain_from_columns(x, kept.iter_ones()))
}

/// Evaluates `f0 <= (f2 + 4) / 2` for a 2-cycle given by its faces, where
/// `f0` counts the vertices it touches and `f2` its faces. The bound holds
/// for 2-cycles with no proper non-empty sub-cycle; checking minimality is
/// up to the caller.
pub fn nevo_check(n: usize, cycle: &Chain2) -> bool {
    let f2 = cycle.norm();
    let f0 = cycle
        .support()
        .iter()
        .flat_map(|t| t.vertices(n))
        .collect::<BTreeSet<_>>()
        .len();
    2 * f0 <= f2 + 4
}

/// The support-minimal 2-cycle `y' ∪ {τ}` obtained from a filling `y` of
/// `∂τ` with `τ` not a face.
pub fn minimal_cycle_through(x: &Complex2, t: TriangleIndex, y: &Chain2) -> Result<Chain2> {
    if x.contains(t) {
        return Err(Error::ContractViolation(format!("{t:?} is already a face")));
    }
    let z = triangle_boundary(x.n(), t);
    let mut cycle = support_minimalize(x, y, &z)?;
    cycle.toggle(t);
    Ok(cycle)
}

/// Per-triangle fillings of a complex, in [`TriangleIndex`] order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FillSummary {
    /// `None` marks an unfillable triangle.
    pub sizes: Vec<Option<usize>>,
    pub infeasible: usize,
    /// Smallest fill among fillable triangles.
    pub min: Option<usize>,
    pub max: Option<usize>,
    /// Sum of squared fills, present only when every triangle is fillable.
    pub sum_sq: Option<u64>,
}

impl FillSummary {
    pub fn from_sizes(sizes: Vec<Option<usize>>) -> Self {
        let infeasible = sizes.iter().filter(|s| s.is_none()).count();
        let feasible = || sizes.iter().flatten().copied();
        let min = feasible().min();
        let max = feasible().max();
        let sum_sq = (infeasible == 0).then(|| feasible().map(|s| (s * s) as u64).sum());
        Self { sizes, infeasible, min, max, sum_sq }
    }

    pub fn all_fillable(&self) -> bool {
        self.infeasible == 0
    }

    pub fn first_infeasible(&self) -> Option<TriangleIndex> {
        self.sizes.iter().position(Option::is_none).map(TriangleIndex)
    }

    pub fn size(&self, t: TriangleIndex) -> Option<usize> {
        self.sizes[t.0]
    }

    /// Smallest fill over fillable triangles that are not faces of `x`.
    pub fn min_nonface(&self, x: &Complex2) -> Option<usize> {
        self.sizes
            .iter()
            .enumerate()
            .filter(|&(t, _)| !x.contains(TriangleIndex(t)))
            .filter_map(|(_, s)| *s)
            .min()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }
}

/// Runs the exact solver on the boundary of every triangle of the full simplex.
pub fn all_triangle_fills(x: &Complex2) -> FillSummary {
    let solver = FillSolver::new(x);
    let sizes = (0..x.triangle_count())
        .into_par_iter()
        .map(|t| solver.fill_triangle(TriangleIndex(t)).size)
        .collect();
    FillSummary::from_sizes(sizes)
}

//! Dense GF(2) linear algebra on 64-bit packed rows.

use std::fmt;

/// A fixed-length bit vector packed into 64-bit words.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitRow {
    words: Vec<u64>,
    len: usize,
}

impl BitRow {
    pub fn zeros(len: usize) -> Self {
        Self { words: vec![0; len.div_ceil(64)], len }
    }

    pub fn from_ones(len: usize, ones: impl IntoIterator<Item = usize>) -> Self {
        let mut row = Self::zeros(len);
        for i in ones {
            row.flip(i);
        }
        row
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i % 64);
        if value {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / 64] ^= 1 << (i % 64);
    }

    #[inline]
    pub fn xor_assign(&mut self, other: &BitRow) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Number of positions set in both rows.
    pub fn and_count(&self, other: &BitRow) -> usize {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    /// Parity of the inner product over GF(2).
    pub fn dot(&self, other: &BitRow) -> bool {
        self.and_count(other) % 2 == 1
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn first_one(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let bit = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(i * 64 + bit)
            })
        })
    }
}

impl fmt::Debug for BitRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// A dense matrix over GF(2), stored as packed rows.
#[derive(Clone, PartialEq, Eq)]
pub struct Gf2Matrix {
    rows: usize,
    cols: usize,
    data: Vec<BitRow>,
}

impl Gf2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![BitRow::zeros(cols); rows] }
    }

    pub fn identity(size: usize) -> Self {
        let mut m = Self::zeros(size, size);
        for i in 0..size {
            m.set(i, i, true);
        }
        m
    }

    /// Builds a matrix from column supports.
    pub fn from_columns(rows: usize, columns: &[BitRow]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (c, col) in columns.iter().enumerate() {
            debug_assert_eq!(col.len(), rows);
            for r in col.iter_ones() {
                m.set(r, c, true);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &BitRow {
        &self.data[r]
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.data[r].get(c)
    }

    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        self.data[r].set(c, value)
    }

    pub fn column(&self, c: usize) -> BitRow {
        BitRow::from_ones(self.rows, (0..self.rows).filter(|&r| self.get(r, c)))
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for (r, row) in self.data.iter().enumerate() {
            for c in row.iter_ones() {
                t.set(c, r, true);
            }
        }
        t
    }

    pub fn mul(&self, other: &Gf2Matrix) -> Gf2Matrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for (r, row) in self.data.iter().enumerate() {
            for k in row.iter_ones() {
                out.data[r].xor_assign(&other.data[k]);
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &BitRow) -> BitRow {
        assert_eq!(self.cols, v.len());
        BitRow::from_ones(self.rows, (0..self.rows).filter(|&r| self.data[r].dot(v)))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(BitRow::is_zero)
    }

    pub fn rank(&self) -> usize {
        Elimination::new(self).rank()
    }

    /// Appends `v` as an extra column.
    pub fn augment(&self, v: &BitRow) -> Gf2Matrix {
        assert_eq!(v.len(), self.rows);
        let mut m = Self::zeros(self.rows, self.cols + 1);
        for r in 0..self.rows {
            for c in self.data[r].iter_ones() {
                m.set(r, c, true);
            }
            m.set(r, self.cols, v.get(r));
        }
        m
    }
}

impl fmt::Debug for Gf2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Gf2Matrix {}x{}", self.rows, self.cols)?;
        for row in &self.data {
            writeln!(f, "{row:?}")?;
        }
        Ok(())
    }
}

/// Reduced row echelon form `T·A = R` of a matrix `A`, keeping the row
/// transform `T` so that many right-hand sides can be solved against one
/// factorization.
#[derive(Clone, Debug)]
pub struct Elimination {
    reduced: Gf2Matrix,
    transform: Gf2Matrix,
    /// `pivots[r]` is the pivot column of row `r`, for `r < rank`.
    pivots: Vec<usize>,
}

impl Elimination {
    pub fn new(a: &Gf2Matrix) -> Self {
        let mut reduced = a.clone();
        let mut transform = Gf2Matrix::identity(a.rows);
        let mut pivots = Vec::new();
        let mut next = 0;
        for c in 0..a.cols {
            if next == a.rows {
                break;
            }
            let Some(p) = (next..a.rows).find(|&r| reduced.data[r].get(c)) else {
                continue;
            };
            reduced.data.swap(next, p);
            transform.data.swap(next, p);
            let pivot_row = reduced.data[next].clone();
            let pivot_t = transform.data[next].clone();
            for r in 0..a.rows {
                if r != next && reduced.data[r].get(c) {
                    reduced.data[r].xor_assign(&pivot_row);
                    transform.data[r].xor_assign(&pivot_t);
                }
            }
            pivots.push(c);
            next += 1;
        }
        Self { reduced, transform, pivots }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// A solution of `A·y = b` with all free variables zero, or `None` when
    /// `b` is outside the column space.
    pub fn solve(&self, b: &BitRow) -> Option<BitRow> {
        let tb = self.transform.mul_vec(b);
        if tb.iter_ones().any(|r| r >= self.rank()) {
            return None;
        }
        let mut y = BitRow::zeros(self.reduced.cols);
        for r in tb.iter_ones() {
            y.set(self.pivots[r], true);
        }
        Some(y)
    }

    /// A basis of the right kernel, one vector per free column.
    pub fn kernel_basis(&self) -> Vec<BitRow> {
        let cols = self.reduced.cols;
        let mut is_pivot = vec![false; cols];
        for &c in &self.pivots {
            is_pivot[c] = true;
        }
        (0..cols)
            .filter(|&c| !is_pivot[c])
            .map(|free| {
                let mut v = BitRow::zeros(cols);
                v.set(free, true);
                for (r, &pc) in self.pivots.iter().enumerate() {
                    if self.reduced.data[r].get(free) {
                        v.set(pc, true);
                    }
                }
                v
            })
            .collect()
    }
}

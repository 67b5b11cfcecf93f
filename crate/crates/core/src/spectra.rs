//! Real cochains, signed coboundaries and the up-down spectral gap.
//!
//! `λ^k(X)` is the smallest Rayleigh quotient `‖dβ‖² / ‖β‖²` over
//! `k`-cochains orthogonal to the image of `d^{k-1}`. The orthogonal
//! complement is spanned by the trailing columns of the full orthogonal
//! factor of a QR decomposition of `d^{k-1}`, and the restricted operator
//! is diagonalized densely.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::complex::{Complex2, EdgeIndex};
use crate::error::{Error, Result};
use crate::numfmt;

/// Eigenvalues at or below this are reported as exactly zero.
pub const ZERO_EIGENVALUE_TOL: f64 = 1e-10;
/// Singular values below this fraction of the largest one count as zero.
pub const RANK_REL_TOL: f64 = 1e-9;

/// An integer coboundary matrix with entries in `{-1, 0, 1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignedMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<i8>,
}

impl SignedMatrix {
    fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, entries: vec![0; rows * cols] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> i8 {
        self.entries[r * self.cols + c]
    }

    fn set(&mut self, r: usize, c: usize, v: i8) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[i8] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    /// Exact integer product.
    pub fn mul(&self, other: &SignedMatrix) -> Vec<Vec<i64>> {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        (0..self.rows)
            .map(|r| {
                (0..other.cols)
                    .map(|c| {
                        (0..self.cols)
                            .map(|k| self.get(r, k) as i64 * other.get(k, c) as i64)
                            .sum()
                    })
                    .collect()
            })
            .collect()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows, self.cols, |r, c| self.get(r, c) as f64)
    }
}

/// Signed coboundary `d^k` for `k ∈ {0, 1}`.
///
/// `(d^0 α)(a,b) = α(b) − α(a)` and
/// `(d^1 β)(a,b,c) = β(b,c) − β(a,c) + β(a,b)` for sorted vertices.
pub fn signed_coboundary(x: &Complex2, k: usize) -> Result<SignedMatrix> {
    let n = x.n();
    match k {
        0 => {
            let mut m = SignedMatrix::zeros(x.edge_count(), n);
            for e in 0..x.edge_count() {
                let (a, b) = EdgeIndex(e).vertices(n);
                m.set(e, a, -1);
                m.set(e, b, 1);
            }
            Ok(m)
        }
        1 => {
            let mut m = SignedMatrix::zeros(x.face_count(), x.edge_count());
            for (r, t) in x.face_indices().enumerate() {
                for (e, s) in t.edges(n).into_iter().zip(FACE_SIGNS) {
                    m.set(r, e.0, s);
                }
            }
            Ok(m)
        }
        _ => Err(Error::InvalidParameter(format!("coboundary degree {k} not in {{0, 1}}"))),
    }
}

/// Signs of edges `(a,b)`, `(a,c)`, `(b,c)` in the coboundary of `(a,b,c)`.
const FACE_SIGNS: [i8; 3] = [1, -1, 1];

/// `(d^1)^T d^1`, assembled face by face, with each edge column optionally
/// divided by `sqrt(weight)`.
fn up_laplacian(x: &Complex2, weights: Option<&[f64]>) -> DMatrix<f64> {
    let n = x.n();
    let m = x.edge_count();
    let scale: Vec<f64> = match weights {
        Some(w) => w.iter().map(|&d| 1.0 / d.sqrt()).collect(),
        None => vec![1.0; m],
    };
    let mut l = DMatrix::zeros(m, m);
    for t in x.face_indices() {
        let edges = t.edges(n);
        for (ei, si) in edges.iter().zip(FACE_SIGNS) {
            for (ej, sj) in edges.iter().zip(FACE_SIGNS) {
                l[(ei.0, ej.0)] += (si * sj) as f64 * scale[ei.0] * scale[ej.0];
            }
        }
    }
    l
}

/// Orthonormal bases `(U, Q)` of `im(A)` and its orthogonal complement, for
/// `A` with full column rank.
fn split_by_image(a: DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    let (rows, rank) = a.shape();
    let qr = a.qr();
    // Q^T applied to the identity gives the full orthogonal factor.
    let mut full = DMatrix::<f64>::identity(rows, rows);
    qr.q_tr_mul(&mut full);
    let full = full.transpose();
    (full.columns(0, rank).into_owned(), full.columns(rank, rows - rank).into_owned())
}

/// Orthonormal basis of `im(d^0)`; `n − 1` columns.
pub fn coboundary_image_basis(n: usize) -> DMatrix<f64> {
    split_by_image(reduced_d0(n)).0
}

/// Orthonormal basis of the divergence-free 1-cochains `ker((d^0)^T)`;
/// `C(n,2) − (n − 1)` columns.
pub fn divergence_free_basis(n: usize) -> DMatrix<f64> {
    split_by_image(reduced_d0(n)).1
}

/// `d^0` with the last vertex column dropped, which leaves `n − 1`
/// independent columns spanning the same image.
fn reduced_d0(n: usize) -> DMatrix<f64> {
    let x = Complex2::new_faceless(n.max(3)).expect("n >= 3");
    let d0 = signed_coboundary(&x, 0).expect("degree 0").to_dense();
    d0.columns(0, n - 1).into_owned()
}

fn smallest_restricted_eigenvalue(op: &DMatrix<f64>, basis: &DMatrix<f64>) -> Result<f64> {
    if basis.ncols() == 0 {
        return Err(Error::InvalidParameter("restricted subspace is empty".into()));
    }
    let restricted = basis.transpose() * op * basis;
    let restricted = (&restricted + restricted.transpose()) * 0.5;
    let min = restricted.symmetric_eigenvalues().min();
    Ok(clamp_zero(min))
}

fn clamp_zero(v: f64) -> f64 {
    if v <= ZERO_EIGENVALUE_TOL {
        0.0
    } else {
        v
    }
}

/// The up-down spectral gap `λ^k(X)` for `k ∈ {0, 1}`.
pub fn lambda_k(x: &Complex2, k: usize) -> Result<f64> {
    let n = x.n();
    match k {
        0 => {
            let mut a = DMatrix::zeros(n, 1);
            a.fill(1.0);
            let mean_zero = split_by_image(a).1;
            let d0 = signed_coboundary(x, 0)?.to_dense();
            smallest_restricted_eigenvalue(&(d0.transpose() * &d0), &mean_zero)
        }
        1 => smallest_restricted_eigenvalue(&up_laplacian(x, None), &divergence_free_basis(n)),
        _ => Err(Error::InvalidParameter(format!("spectral gap degree {k} not in {{0, 1}}"))),
    }
}

/// Real first Betti number `C(n,2) − (n−1) − rank(d^1)`.
///
/// The rank is read off the singular values of the Gram matrix
/// `(d^1)^T d^1`, which has the rank of `d^1` and is only `C(n,2)` square.
pub fn betti1_real(x: &Complex2) -> usize {
    let n = x.n();
    let cycle_space = x.edge_count() - (n - 1);
    if x.face_count() == 0 {
        return cycle_space;
    }
    let sv = up_laplacian(x, None).symmetric_eigenvalues().map(f64::abs);
    let top = sv.max();
    let rank = sv.iter().filter(|&&s| s > RANK_REL_TOL * top).count();
    cycle_space - rank
}

/// Spectral gap of the degree-normalized up-down operator on divergence-free
/// 1-cochains: the coboundary of each edge is divided by the square root of
/// its degree on both sides, so edge-regular complexes of degree `D` give
/// exactly `λ^1 / D`.
pub fn normalized_lambda1(x: &Complex2) -> Result<f64> {
    let n = x.n();
    let degrees = x.edge_degrees();
    if let Some(e) = degrees.iter().position(|&d| d == 0) {
        let (a, b) = EdgeIndex(e).vertices(n);
        return Err(Error::DegenerateDegree(a, b));
    }
    let w: Vec<f64> = degrees.iter().map(|&d| d as f64).collect();
    smallest_restricted_eigenvalue(&up_laplacian(x, Some(&w)), &divergence_free_basis(n))
}

/// Spectral data of one complex.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralReport {
    #[serde(serialize_with = "numfmt::ser_f64")]
    pub lambda1: f64,
    #[serde(serialize_with = "numfmt::ser_f64")]
    pub lambda0: f64,
    pub betti1_real: usize,
    /// `None` when some edge lies in no face.
    #[serde(serialize_with = "numfmt::ser_opt_f64")]
    pub normalized_lambda1: Option<f64>,
    pub subspace_dim: usize,
}

impl SpectralReport {
    pub fn compute(x: &Complex2) -> Result<Self> {
        let n = x.n();
        let basis = divergence_free_basis(n);
        let lambda1 = smallest_restricted_eigenvalue(&up_laplacian(x, None), &basis)?;
        let normalized_lambda1 = match normalized_lambda1(x) {
            Ok(v) => Some(v),
            Err(Error::DegenerateDegree(..)) => None,
            Err(e) => return Err(e),
        };
        Ok(Self {
            lambda1,
            lambda0: lambda_k(x, 0)?,
            betti1_real: betti1_real(x),
            normalized_lambda1,
            subspace_dim: basis.ncols(),
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }
}

/// `‖d^1 β‖²` for a real 1-cochain, evaluated face by face.
pub fn coboundary_norm_sq(x: &Complex2, beta: &DVector<f64>) -> f64 {
    let n = x.n();
    x.face_indices()
        .map(|t| {
            let v: f64 = t.edges(n).iter().zip(FACE_SIGNS).map(|(e, s)| s as f64 * beta[e.0]).sum();
            v * v
        })
        .sum()
}

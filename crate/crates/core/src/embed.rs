//! Affine embeddings of 2-complexes and the area cochain bound.
//!
//! An affine map is fixed by the vertex images. For a triangle `τ` the
//! Hilbert-space filling of `φ(∂τ)` is the area of the flat triangle
//! `φ(τ)`, so everything here is driven by triangle areas.
//!
//! The vector-valued edge cochain `ξ` assigns to an edge the coordinate
//! 2-form integrals `½∫ x_i dx_j − x_j dx_i` along its image. Its
//! coboundary on a face is the vector of signed projected areas, whose
//! Euclidean norm is the face area. Subtracting from `ξ` its orthogonal
//! projection onto `im(d^0)` gives a divergence-free cochain `ψ` with the
//! same coboundary, which then satisfies
//!
//! ```text
//! Σ_f Area(φf)² = ‖dψ‖² ≥ λ¹‖ψ‖² ≥ λ¹ / (3(n−2)) · Σ_τ Fill(τ)²
//! ```
//!
//! once `φ` is scaled so that every triangle area dominates its filling.

use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::chains::{all_triangle_fills, FillSummary};
use crate::complex::{all_triangles, edge_count, Complex2, EdgeIndex, TriangleIndex};
use crate::error::{Error, Result};
use crate::numfmt;
use crate::spectra::{coboundary_image_basis, lambda_k};

/// Relative tolerance of the inequality checks.
pub const INEQUALITY_REL_TOL: f64 = 1e-9;
/// A triangle is degenerate when the sine of its angle at the first vertex
/// is below this.
pub const DEGENERATE_SINE: f64 = 1e-10;

/// Vertex images of an affine map into `R^dim`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Embedding {
    n: usize,
    dim: usize,
    coords: Vec<Vec<f64>>,
}

impl Embedding {
    pub fn new(coords: Vec<Vec<f64>>) -> Result<Self> {
        let n = coords.len();
        if n < 3 {
            return Err(Error::InvalidParameter(format!("need n >= 3 vertices, got {n}")));
        }
        let dim = coords[0].len();
        if dim == 0 {
            return Err(Error::InvalidParameter("ambient dimension is zero".into()));
        }
        if coords.iter().any(|c| c.len() != dim) {
            return Err(Error::InvalidParameter("coordinate vectors differ in length".into()));
        }
        if coords.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("non-finite coordinate".into()));
        }
        Ok(Self { n, dim, coords })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coords(&self) -> &[Vec<f64>] {
        &self.coords
    }

    pub fn point(&self, v: usize) -> &[f64] {
        &self.coords[v]
    }

    pub fn scaled(&self, s: f64) -> Embedding {
        Embedding {
            n: self.n,
            dim: self.dim,
            coords: self.coords.iter().map(|c| c.iter().map(|v| v * s).collect()).collect(),
        }
    }

    /// Vertex coordinates in an orthonormal basis of a subspace containing
    /// the linear span of the images, padded to `n` columns.
    pub fn span_coordinates(&self) -> DMatrix<f64> {
        let pt = DMatrix::from_fn(self.dim, self.n, |r, c| self.coords[c][r]);
        let r = pt.qr().r();
        let k = r.nrows();
        DMatrix::from_fn(self.n, self.n, |v, i| if i < k { r[(i, v)] } else { 0.0 })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Raw {
            n: usize,
            dim: usize,
            coords: Vec<Vec<f64>>,
        }
        let raw: Raw = serde_json::from_str(text)?;
        if raw.coords.len() != raw.n || raw.coords.iter().any(|c| c.len() != raw.dim) {
            return Err(Error::Format("coords do not match n and dim".into()));
        }
        Self::new(raw.coords).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_json()?)?;
        Ok(())
    }

    fn check_complex(&self, x: &Complex2) -> Result<()> {
        if self.n != x.n() {
            return Err(Error::InvalidParameter(format!(
                "embedding has {} vertices, complex has {}",
                self.n,
                x.n()
            )));
        }
        Ok(())
    }
}

/// Vertex `i` goes to the `i`-th standard unit vector of `R^n`.
pub fn standard_basis_embedding(n: usize) -> Result<Embedding> {
    Embedding::new((0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect())
}

/// I.i.d. standard normal coordinates.
pub fn random_gaussian_embedding<R: Rng + ?Sized>(n: usize, dim: usize, rng: &mut R) -> Result<Embedding> {
    if dim < 2 {
        return Err(Error::InvalidParameter(format!("ambient dimension {dim} < 2")));
    }
    Embedding::new((0..n).map(|_| (0..dim).map(|_| rng.sample(StandardNormal)).collect()).collect())
}

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `(|u|², |v|², Gram determinant)` for the edge vectors at the first vertex.
fn gram(emb: &Embedding, [a, b, c]: [usize; 3]) -> (f64, f64, f64) {
    let u = sub(emb.point(b), emb.point(a));
    let v = sub(emb.point(c), emb.point(a));
    let (uu, vv, uv) = (dot(&u, &u), dot(&v, &v), dot(&u, &v));
    (uu, vv, (uu * vv - uv * uv).max(0.0))
}

/// Area of the flat triangle spanned by three vertex images.
pub fn triangle_area(emb: &Embedding, t: [usize; 3]) -> f64 {
    0.5 * gram(emb, t).2.sqrt()
}

fn is_degenerate(emb: &Embedding, t: [usize; 3]) -> bool {
    let (uu, vv, det) = gram(emb, t);
    det <= DEGENERATE_SINE * DEGENERATE_SINE * uu * vv || det == 0.0
}

/// Index of channel `(i < j)` among `C(dim, 2)` channels.
fn channel(dim: usize, i: usize, j: usize) -> usize {
    EdgeIndex::from_vertices(dim, i, j).0
}

/// Channel vector `½(V_i W_j − V_j W_i)` of the segment from `V` to `W`,
/// the closed form of `½∫ x_i dx_j − x_j dx_i` along it.
pub fn segment_area_form(v: &[f64], w: &[f64]) -> Vec<f64> {
    let dim = v.len();
    let mut out = vec![0.0; dim * (dim - 1) / 2];
    for i in 0..dim {
        for j in i + 1..dim {
            out[channel(dim, i, j)] = 0.5 * (v[i] * w[j] - v[j] * w[i]);
        }
    }
    out
}

/// Signed projected areas `½[(B−A)_i (C−A)_j − (B−A)_j (C−A)_i]` of a triangle.
pub fn shoelace_channels(a: &[f64], b: &[f64], c: &[f64]) -> Vec<f64> {
    let u = sub(b, a);
    let v = sub(c, a);
    segment_area_form(&u, &v)
}

/// A real edge cochain with `C(n,2)` channels: one row per edge in
/// [`EdgeIndex`] order, one column per coordinate pair `(i < j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorCochain1 {
    pub values: DMatrix<f64>,
}

impl VectorCochain1 {
    pub fn norm_sq(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }

    pub fn edge(&self, e: EdgeIndex) -> Vec<f64> {
        self.values.row(e.0).iter().copied().collect()
    }

    /// `(d^0)^T` applied channel-wise: the divergence at each vertex.
    pub fn divergence(&self, n: usize) -> DMatrix<f64> {
        let mut div = DMatrix::zeros(n, self.values.ncols());
        for e in 0..self.values.nrows() {
            let (a, b) = EdgeIndex(e).vertices(n);
            for ch in 0..self.values.ncols() {
                div[(b, ch)] += self.values[(e, ch)];
                div[(a, ch)] -= self.values[(e, ch)];
            }
        }
        div
    }
}

/// `ξ` for vertex positions given in orthonormal coordinates, one row per
/// vertex. The value on edge `v < w` is `segment_area_form(V, W)`.
pub fn xi_from_coordinates(coords: &DMatrix<f64>) -> VectorCochain1 {
    let n = coords.nrows();
    let dim = coords.ncols();
    let rows: Vec<Vec<f64>> = (0..n).map(|v| coords.row(v).iter().copied().collect()).collect();
    let mut values = DMatrix::zeros(edge_count(n), dim * (dim - 1) / 2);
    for e in 0..edge_count(n) {
        let (v, w) = EdgeIndex(e).vertices(n);
        for (ch, val) in segment_area_form(&rows[v], &rows[w]).into_iter().enumerate() {
            values[(e, ch)] = val;
        }
    }
    VectorCochain1 { values }
}

/// `ξ` of an embedding, after re-expressing it in span coordinates.
pub fn xi_cochain(emb: &Embedding) -> VectorCochain1 {
    xi_from_coordinates(&emb.span_coordinates())
}

/// `ψ = ξ − P ξ` where `P` projects each channel orthogonally onto `im(d^0)`.
///
/// Every channel of `ψ` is divergence-free and `dψ = dξ`. Only the vertex
/// count of `x` matters.
pub fn psi_cochain(x: &Complex2, emb: &Embedding) -> Result<VectorCochain1> {
    emb.check_complex(x)?;
    let xi = xi_cochain(emb);
    let u = coboundary_image_basis(x.n());
    let projection = &u * (u.transpose() * &xi.values);
    Ok(VectorCochain1 { values: xi.values - projection })
}

/// `dψ` per face: row `f` holds `ψ(bc) − ψ(ac) + ψ(ab)` for face `(a,b,c)`.
pub fn coboundary_channels(x: &Complex2, psi: &VectorCochain1) -> DMatrix<f64> {
    let n = x.n();
    let ch = psi.values.ncols();
    let mut out = DMatrix::zeros(x.face_count(), ch);
    for (r, t) in x.face_indices().enumerate() {
        let [ab, ac, bc] = t.edges(n);
        for c in 0..ch {
            out[(r, c)] = psi.values[(bc.0, c)] - psi.values[(ac.0, c)] + psi.values[(ab.0, c)];
        }
    }
    out
}

fn require_fillable(fills: &FillSummary) -> Result<()> {
    match fills.first_infeasible() {
        Some(t) => Err(Error::HomologyObstruction(t)),
        None => Ok(()),
    }
}

/// `(Fill_X(τ), Area(φτ))` for every triangle of the full simplex.
fn fill_area_pairs(emb: &Embedding, fills: &FillSummary) -> Result<Vec<(f64, f64)>> {
    require_fillable(fills)?;
    all_triangles(emb.n())
        .enumerate()
        .map(|(r, t)| {
            if is_degenerate(emb, t) {
                return Err(Error::DegenerateEmbedding(TriangleIndex(r)));
            }
            let fill = fills.sizes[r].expect("checked fillable") as f64;
            Ok((fill, triangle_area(emb, t)))
        })
        .collect()
}

/// The factor `s` with `s² = max_τ Fill_X(τ) / Area(φτ)`; scaling the
/// embedding by `s` makes every triangle area at least its filling.
pub fn scale_factor(x: &Complex2, emb: &Embedding) -> Result<f64> {
    emb.check_complex(x)?;
    scale_factor_with_fills(emb, &all_triangle_fills(x))
}

pub fn scale_factor_with_fills(emb: &Embedding, fills: &FillSummary) -> Result<f64> {
    let pairs = fill_area_pairs(emb, fills)?;
    let ratio = pairs.iter().map(|(f, a)| f / a).fold(0.0, f64::max);
    Ok(ratio.sqrt())
}

/// `max_τ(Area/Fill) · max_τ(Fill/Area)` over all triangles: the filling
/// distortion restricted to triangle boundaries, a lower bound on the full
/// filling distortion.
pub fn triangle_distortion(x: &Complex2, emb: &Embedding) -> Result<f64> {
    emb.check_complex(x)?;
    triangle_distortion_with_fills(emb, &all_triangle_fills(x))
}

pub fn triangle_distortion_with_fills(emb: &Embedding, fills: &FillSummary) -> Result<f64> {
    let pairs = fill_area_pairs(emb, fills)?;
    let expand = pairs.iter().map(|(f, a)| a / f).fold(0.0, f64::max);
    let shrink = pairs.iter().map(|(f, a)| f / a).fold(0.0, f64::max);
    Ok(expand * shrink)
}

/// Numerical evaluation of the area inequality for one embedding.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InequalityReport {
    /// `Σ_f Area(φf)²` over faces, after scaling.
    #[serde(serialize_with = "numfmt::ser_f64")]
    pub lhs: f64,
    /// `λ¹ / (3(n−2)) · Σ_τ Fill_X(τ)²`.
    #[serde(serialize_with = "numfmt::ser_f64")]
    pub rhs: f64,
    #[serde(serialize_with = "numfmt::ser_f64")]
    pub scale: f64,
    #[serde(serialize_with = "numfmt::ser_f64")]
    pub psi_norm_sq: f64,
    #[serde(serialize_with = "numfmt::ser_f64")]
    pub dpsi_norm_sq: f64,
    pub holds: bool,
    /// `‖dψ‖² = lhs` to relative tolerance.
    pub norm_identity_ok: bool,
    /// `‖dψ‖² ≥ λ¹ ‖ψ‖²`.
    pub spectral_step_ok: bool,
    /// `(n−2)‖ψ‖² ≥ ⅓ Σ_τ Fill_X(τ)²`.
    pub counting_step_ok: bool,
}

impl InequalityReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn norm_identity_residual(&self) -> f64 {
        (self.dpsi_norm_sq - self.lhs).abs() / self.lhs.max(f64::MIN_POSITIVE)
    }
}

pub fn main_inequality_report(x: &Complex2, emb: &Embedding) -> Result<InequalityReport> {
    emb.check_complex(x)?;
    let fills = all_triangle_fills(x);
    require_fillable(&fills)?;
    inequality_report_with(x, emb, &fills, lambda_k(x, 1)?)
}

/// As [`main_inequality_report`], reusing precomputed fills and `λ¹`.
pub fn inequality_report_with(
    x: &Complex2,
    emb: &Embedding,
    fills: &FillSummary,
    lambda1: f64,
) -> Result<InequalityReport> {
    emb.check_complex(x)?;
    let n = x.n();
    let scale = scale_factor_with_fills(emb, fills)?;
    let scaled = emb.scaled(scale);
    let fill_sq = fills.sum_sq.expect("checked fillable") as f64;

    let lhs: f64 = x.faces().iter().map(|&f| triangle_area(&scaled, f).powi(2)).sum();
    let rhs = lambda1 / (3.0 * (n - 2) as f64) * fill_sq;

    let psi = psi_cochain(x, &scaled)?;
    let dpsi = coboundary_channels(x, &psi);
    let psi_norm_sq = psi.norm_sq();
    let dpsi_norm_sq: f64 = dpsi.iter().map(|v| v * v).sum();

    let tol = INEQUALITY_REL_TOL;
    Ok(InequalityReport {
        lhs,
        rhs,
        scale,
        psi_norm_sq,
        dpsi_norm_sq,
        holds: lhs >= rhs * (1.0 - tol),
        norm_identity_ok: (dpsi_norm_sq - lhs).abs() <= tol * lhs.max(f64::MIN_POSITIVE),
        spectral_step_ok: dpsi_norm_sq >= (lambda1 - 1e-8) * psi_norm_sq,
        counting_step_ok: (n - 2) as f64 * psi_norm_sq >= fill_sq / 3.0 * (1.0 - tol),
    })
}

/// Lower bound on the filling distortion of every affine embedding.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Certificate {
    /// `√(λ¹ · Σ_τ Fill²  / (3(n−2)·|faces|))`.
    #[serde(serialize_with = "numfmt::ser_f64")]
    pub value: f64,
    #[serde(serialize_with = "numfmt::ser_f64")]
    pub lambda1: f64,
    pub face_count: usize,
    pub fill_sum_sq: u64,
}

impl Certificate {
    pub fn from_parts(x: &Complex2, lambda1: f64, fills: &FillSummary) -> Result<Self> {
        if lambda1 <= 0.0 || x.face_count() == 0 {
            return Err(Error::ZeroSpectralGap);
        }
        require_fillable(fills)?;
        let fill_sum_sq = fills.sum_sq.expect("checked fillable");
        let denom = 3.0 * (x.n() - 2) as f64 * x.face_count() as f64;
        Ok(Self {
            value: (lambda1 * fill_sum_sq as f64 / denom).sqrt(),
            lambda1,
            face_count: x.face_count(),
            fill_sum_sq,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }
}

/// The spectral gap is checked first: a complex with `λ¹ = 0` yields
/// [`Error::ZeroSpectralGap`] even if some triangle is also unfillable.
pub fn distortion_certificate(x: &Complex2) -> Result<Certificate> {
    let lambda1 = lambda_k(x, 1)?;
    if lambda1 <= 0.0 {
        return Err(Error::ZeroSpectralGap);
    }
    Certificate::from_parts(x, lambda1, &all_triangle_fills(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
    }

    fn plane(points: &[[f64; 2]]) -> Embedding {
        Embedding::new(points.iter().map(|p| p.to_vec()).collect()).unwrap()
    }

    #[test]
    fn standard_basis_geometry() {
        let e = standard_basis_embedding(3).unwrap();
        for (a, b) in [(0, 1), (0, 2), (1, 2)] {
            let d = sub(e.point(a), e.point(b));
            assert!((dot(&d, &d).sqrt() - 2f64.sqrt()).abs() < 1e-15);
        }
        let e = standard_basis_embedding(6).unwrap();
        for t in all_triangles(6) {
            assert!((triangle_area(&e, t) - 3f64.sqrt() / 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn areas() {
        let e = plane(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [2.0, 0.0]]);
        assert_eq!(triangle_area(&e, [0, 1, 2]), 0.5);
        assert_eq!(triangle_area(&e, [0, 1, 3]), 0.0);
        assert!((triangle_area(&standard_basis_embedding(3).unwrap(), [0, 1, 2]) - 0.8660254037844386).abs() < 1e-12);
    }

    #[test]
    fn gaussian_embeddings() {
        let a = random_gaussian_embedding(5, 3, &mut ChaCha8Rng::seed_from_u64(4)).unwrap();
        let b = random_gaussian_embedding(5, 3, &mut ChaCha8Rng::seed_from_u64(4)).unwrap();
        assert_eq!(a, b);
        assert!(a.coords().iter().flatten().any(|&v| v != 0.0));
        assert!(random_gaussian_embedding(5, 1, &mut ChaCha8Rng::seed_from_u64(4)).is_err());

        let draws = 100_000;
        let e = random_gaussian_embedding(draws, 1 + 1, &mut ChaCha8Rng::seed_from_u64(11)).unwrap();
        let mean = e.coords().iter().map(|c| c[0]).sum::<f64>() / draws as f64;
        assert!(mean.abs() < 4.0 / (draws as f64).sqrt());
    }

    #[test]
    fn segment_forms() {
        assert_eq!(segment_area_form(&[0.0, 0.0], &[1.0, 1.0]), vec![0.0]);
        assert_eq!(segment_area_form(&[1.0, 0.0], &[0.0, 1.0]), vec![0.5]);
        let v = [0.3, -1.2, 2.0];
        let w = [1.1, 0.4, -0.7];
        let fwd = segment_area_form(&v, &w);
        let back = segment_area_form(&w, &v);
        assert!(fwd.iter().zip(&back).all(|(a, b)| *a == -*b));
    }

    #[test]
    fn shoelace_examples() {
        let ch = shoelace_channels(&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0]);
        assert_eq!(ch, vec![0.5]);

        let e = standard_basis_embedding(3).unwrap();
        let ch = shoelace_channels(e.point(0), e.point(1), e.point(2));
        assert!(ch.iter().all(|c| (c.abs() - 0.5).abs() < 1e-15));
        let norm = ch.iter().map(|c| c * c).sum::<f64>().sqrt();
        assert!((norm - 3f64.sqrt() / 2.0).abs() < 1e-15);

        // raw standard-basis coordinates are already orthonormal
        let x = Complex2::from_faces(3, [[0, 1, 2]]).unwrap();
        let coords = DMatrix::identity(3, 3);
        let d = coboundary_channels(&x, &xi_from_coordinates(&coords));
        assert!(d.iter().all(|c| (c.abs() - 0.5).abs() < 1e-15));
    }

    #[test]
    fn stokes_in_the_plane() {
        let e = plane(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]);
        let x = Complex2::from_faces(3, [[0, 1, 2]]).unwrap();
        let xi = xi_from_coordinates(&DMatrix::from_fn(3, 2, |v, i| e.point(v)[i]));
        let d = coboundary_channels(&x, &xi);
        assert_eq!(d[(0, 0)], 0.5);
    }

    #[test]
    fn scale_factor_examples() {
        let x = Complex2::new_complete(5).unwrap();
        let e = standard_basis_embedding(5).unwrap();
        let s = scale_factor(&x, &e).unwrap();
        assert!((s * s - 2.0 / 3f64.sqrt()).abs() < 1e-12);
        let again = scale_factor(&x, &e.scaled(s)).unwrap();
        assert!((again - 1.0).abs() < 1e-12);

        let mut coords = standard_basis_embedding(5).unwrap().coords().to_vec();
        coords[2] = coords[0].iter().zip(&coords[1]).map(|(a, b)| 0.5 * (a + b)).collect();
        let flat = Embedding::new(coords).unwrap();
        assert!(matches!(scale_factor(&x, &flat), Err(Error::DegenerateEmbedding(_))));

        let holey = Complex2::new_faceless(5).unwrap();
        assert!(matches!(scale_factor(&holey, &e), Err(Error::HomologyObstruction(_))));
    }

    #[test]
    fn psi_properties() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let x = Complex2::sample_lm(7, 0.6, &mut rng).unwrap();
        let e = random_gaussian_embedding(7, 4, &mut rng).unwrap();
        let xi = xi_cochain(&e);
        let psi = psi_cochain(&x, &e).unwrap();
        let scale = psi.norm_sq().sqrt();
        assert!(psi.divergence(7).amax() <= 1e-9 * scale);
        assert!(psi.norm_sq() <= xi.norm_sq() + 1e-12);
        let d_psi = coboundary_channels(&x, &psi);
        let d_xi = coboundary_channels(&x, &xi);
        assert!((d_psi - d_xi).amax() < 1e-12);
    }

    #[test]
    fn complete_six_inequality() {
        let x = Complex2::new_complete(6).unwrap();
        let r = main_inequality_report(&x, &standard_basis_embedding(6).unwrap()).unwrap();
        assert!(close(r.lhs, 20.0, 1e-12));
        assert!(close(r.rhs, 10.0, 1e-12));
        assert!(r.holds && r.norm_identity_ok && r.spectral_step_ok && r.counting_step_ok);
        let v: serde_json::Value = serde_json::from_str(&r.to_json().unwrap()).unwrap();
        assert_eq!(v["lhs"], serde_json::json!(20.0));
    }

    #[test]
    fn certificates() {
        let c = distortion_certificate(&Complex2::new_complete(5).unwrap()).unwrap();
        assert!((c.value - (5.0f64 / 9.0).sqrt()).abs() < 1e-9);
        assert_eq!((c.face_count, c.fill_sum_sq), (10, 10));
        assert!(matches!(
            distortion_certificate(&Complex2::new_faceless(5).unwrap()),
            Err(Error::ZeroSpectralGap)
        ));
    }

    #[test]
    fn distortion_examples() {
        for n in 4..8 {
            let x = Complex2::new_complete(n).unwrap();
            let d = triangle_distortion(&x, &standard_basis_embedding(n).unwrap()).unwrap();
            assert!((d - 1.0).abs() < 1e-12);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut checked = 0;
        while checked < 10 {
            let x = Complex2::sample_lm(7, 0.5, &mut rng).unwrap();
            let fills = all_triangle_fills(&x);
            if !fills.all_fillable() {
                continue;
            }
            let d = triangle_distortion_with_fills(&standard_basis_embedding(7).unwrap(), &fills).unwrap();
            assert!(d >= 1.0 - 1e-12);
            assert!(d <= fills.max.unwrap() as f64 + 1e-9);
            checked += 1;
        }
    }

    #[test]
    fn json_round_trip() {
        let e = random_gaussian_embedding(4, 3, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        let text = e.to_json().unwrap();
        assert!(text.starts_with(r#"{"n":4,"dim":3,"coords":[["#));
        assert_eq!(Embedding::from_json(&text).unwrap(), e);
        assert!(Embedding::from_json(r#"{"n":3,"dim":2,"coords":[[0,0],[1,0]]}"#).is_err());
    }

    fn fillable_sample(rng: &mut ChaCha8Rng, n: usize, p: f64) -> (Complex2, FillSummary) {
        loop {
            let x = Complex2::sample_lm(n, p, rng).unwrap();
            let fills = all_triangle_fills(&x);
            if fills.all_fillable() {
                return (x, fills);
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn stokes_consistency(seed in any::<u64>(), n in 4usize..9, dim in 2usize..12) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let x = Complex2::sample_lm(n, 0.7, &mut rng).unwrap();
            let e = random_gaussian_embedding(n, dim, &mut rng).unwrap();
            let psi = psi_cochain(&x, &e).unwrap();
            let d = coboundary_channels(&x, &psi);
            for (r, &f) in x.faces().iter().enumerate() {
                let norm = d.row(r).norm();
                let area = triangle_area(&e, f);
                prop_assert!(close(norm, area, 1e-9), "{norm} vs {area}");
            }
        }

        #[test]
        fn inequality_chain(seed in any::<u64>(), n in 5usize..9) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (x, fills) = fillable_sample(&mut rng, n, 0.7);
            let e = random_gaussian_embedding(n, n, &mut rng).unwrap();
            let l = lambda_k(&x, 1).unwrap();
            let r = inequality_report_with(&x, &e, &fills, l).unwrap();
            prop_assert!(r.holds);
            prop_assert!(r.norm_identity_ok);
            prop_assert!(r.spectral_step_ok);
            prop_assert!(r.counting_step_ok);
            prop_assert!(r.norm_identity_residual() < 1e-9);
        }

        #[test]
        fn distortion_is_scale_invariant(seed in any::<u64>(), n in 4usize..8) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (_, fills) = fillable_sample(&mut rng, n, 0.8);
            let e = random_gaussian_embedding(n, 3, &mut rng).unwrap();
            let base = triangle_distortion_with_fills(&e, &fills).unwrap();
            prop_assert!(base >= 1.0 - 1e-12);
            for s in [0.1, 7.0, 1000.0] {
                let d = triangle_distortion_with_fills(&e.scaled(s), &fills).unwrap();
                prop_assert!(close(d, base, 1e-12));
            }
        }

        #[test]
        fn certificate_below_distortion(seed in any::<u64>(), n in 5usize..9) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (x, fills) = fillable_sample(&mut rng, n, 0.7);
            let l = lambda_k(&x, 1).unwrap();
            let e = random_gaussian_embedding(n, n, &mut rng).unwrap();
            let d = triangle_distortion_with_fills(&e, &fills).unwrap();
            if let Ok(c) = Certificate::from_parts(&x, l, &fills) {
                prop_assert!(c.value <= d * (1.0 + 1e-9));
            }
        }
    }
}

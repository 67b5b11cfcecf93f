use std::io;

use thiserror::Error;

use crate::complex::TriangleIndex;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("contract violation: {0}")]
    ContractViolation(String),

    /// Some edge lies in no face, so the degree-normalized operator is undefined.
    #[error("edge ({0}, {1}) has degree 0")]
    DegenerateDegree(usize, usize),

    /// The boundary of this triangle is not a GF(2) boundary in the complex.
    #[error("triangle {0:?} has no filling")]
    HomologyObstruction(TriangleIndex),

    #[error("triangle {0:?} has zero area under the embedding")]
    DegenerateEmbedding(TriangleIndex),

    #[error("spectral gap is zero; the certificate is vacuous")]
    ZeroSpectralGap,

    #[error("malformed input: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

//! Filling distortion of 2-dimensional simplicial complexes.
//!
//! The crate works with complexes on `n` vertices that carry the complete
//! 1-skeleton and an arbitrary set of 2-faces. It provides
//!
//! * [`complex`]: the complex model, the Linial–Meshulam sampler and edge degrees,
//! * [`chains`]: GF(2) boundary operators and exact minimum-weight fillings,
//! * [`spectra`]: signed coboundaries and the up-down spectral gap on 1-cochains,
//! * [`embed`]: affine embeddings, the area cochain construction and distortion certificates,
//! * [`harness`]: seeded Monte Carlo sweeps with CSV/JSON output.
//!
//! Every row and column order is fixed by lexicographic ranking of vertex
//! pairs and triples (see [`EdgeIndex`] and [`TriangleIndex`]), so all
//! outputs are reproducible byte for byte.

pub mod chains;
pub mod complex;
pub mod embed;
mod error;
pub mod gf2;
pub mod harness;
pub mod numfmt;
pub mod spectra;

pub use chains::{Chain1, Chain2, Cycle1, FillResult, FillSolver, FillStatus, FillSummary};
pub use complex::{Complex2, EdgeIndex, TriangleIndex};
pub use embed::{Certificate, Embedding, InequalityReport, VectorCochain1};
pub use error::{Error, Result};
pub use gf2::{BitRow, Gf2Matrix};
pub use harness::{ExperimentConfig, ExperimentRecord, Mode, OutputFormat, PSpec};
pub use spectra::{SignedMatrix, SpectralReport};

//! Spectral clustering with power-method eigenvector approximation.
//!
//! The exact algorithm embeds the points with the top-k eigenvectors of the
//! normalized adjacency `W̃ = D^{-1/2} W D^{-1/2}` and runs k-means on the
//! rows. The approximate algorithm replaces the eigenvectors with the left
//! singular vectors of `W̃^{2p+1} S` for a Gaussian `S`. The [`spectral`]
//! module also measures how far the two embeddings, and the resulting
//! clusterings, can drift apart.

pub mod clustering;
pub mod dataio;
pub mod error;
pub mod graph;
pub mod linalg;
pub mod pipeline;
pub mod spectral;

pub use clustering::{Clustering, KmeansResult, LloydOptions};
pub use dataio::{Dataset, RngStream};
pub use error::{Error, Result};
pub use graph::{SigmaMode, SimilarityGraph};
pub use linalg::DenseMatrix;
pub use spectral::{BoundReport, Embedding, EmbeddingKind, GapReport};

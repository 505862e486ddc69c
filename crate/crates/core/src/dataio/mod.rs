//! Dataset ingestion, synthetic generators and the seeded random substrate.

mod generators;
mod libsvm;
mod rng;
mod text;

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

pub use generators::{block_labels, gen_blobs, gen_sbm, gen_two_rings};
pub use libsvm::{parse_libsvm, serialize_libsvm, LibsvmData, LibsvmStats};
pub use rng::{derive_seed, gaussian, RngStream};
pub use text::{
    read_dataset_csv, read_labels, read_matrix_csv, write_dataset_csv, write_labels,
    write_matrix_csv,
};

/// Points in Rᵈ with ground-truth class ids densified to `0..classes`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub name: String,
    pub points: DenseMatrix,
    pub labels: Vec<usize>,
}

impl Dataset {
    pub fn new(name: impl Into<String>, points: DenseMatrix, labels: Vec<usize>) -> Result<Self> {
        if labels.len() != points.rows() {
            return Err(Error::Shape(format!(
                "{} labels for {} points",
                labels.len(),
                points.rows()
            )));
        }
        if points.cols() == 0 {
            return Err(Error::Shape("dataset needs at least one feature".into()));
        }
        Ok(Self {
            name: name.into(),
            points,
            labels,
        })
    }

    pub fn len(&self) -> usize {
        self.points.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.points.rows() == 0
    }

    pub fn dim(&self) -> usize {
        self.points.cols()
    }

    /// Number of distinct labels.
    pub fn n_classes(&self) -> usize {
        let mut seen: Vec<usize> = self.labels.clone();
        seen.sort_unstable();
        seen.dedup();
        seen.len()
    }
}

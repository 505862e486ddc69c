//! Fixtures shared by the criterion benches.

use specpow_core::dataio::{gen_sbm, gen_two_rings, RngStream};
use specpow_core::graph::{build_graph, build_similarity};
use specpow_core::{DenseMatrix, SigmaMode, SimilarityGraph};

/// Two equal blocks with light jitter so every degree is positive.
pub fn sbm_graph(n: usize, seed: u64) -> SimilarityGraph {
    let half = n / 2;
    let w = gen_sbm(&[half, n - half], 0.3, 0.02, Some(1e-3), seed).expect("valid sbm parameters");
    build_graph(w).expect("sbm graph")
}

/// Self-tuning heat-kernel graph over two noisy rings.
pub fn rings_graph(n_per_ring: usize, seed: u64) -> SimilarityGraph {
    let ds = gen_two_rings(n_per_ring, 1.0, 3.0, 0.1, seed).expect("valid ring parameters");
    let w = build_similarity(&ds.points, SigmaMode::default()).expect("similarity");
    build_graph(w).expect("rings graph")
}

/// Symmetric matrix with standard Gaussian entries.
pub fn random_symmetric(n: usize, seed: u64) -> DenseMatrix {
    let mut rng = RngStream::new(seed);
    let mut a = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let v = rng.gaussian();
            a.row_mut(i)[j] = v;
            a.row_mut(j)[i] = v;
        }
    }
    a
}

/// `rows × cols` matrix with standard Gaussian entries.
pub fn random_matrix(rows: usize, cols: usize, seed: u64) -> DenseMatrix {
    let mut rng = RngStream::new(seed);
    DenseMatrix::from_fn(rows, cols, |_, _| rng.gaussian())
}

use std::f64::consts::PI;

use super::{Dataset, RngStream};
use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

/// Two concentric noisy circles centred at the origin.
///
/// Angles are uniform; each radius gets independent Gaussian noise with
/// standard deviation `noise_sd`. Label 0 is the inner ring.
pub fn gen_two_rings(
    n_per_ring: usize,
    r_inner: f64,
    r_outer: f64,
    noise_sd: f64,
    seed: u64,
) -> Result<Dataset> {
    if !(r_inner > 0.0 && r_inner < r_outer && r_outer.is_finite()) {
        return Err(Error::Parameter(format!(
            "need 0 < r_inner < r_outer, got {r_inner} and {r_outer}"
        )));
    }
    if !(noise_sd >= 0.0 && noise_sd.is_finite()) {
        return Err(Error::Parameter(format!("noise_sd must be >= 0, got {noise_sd}")));
    }
    if n_per_ring == 0 {
        return Err(Error::Parameter("n_per_ring must be positive".into()));
    }
    let mut rng = RngStream::new(seed);
    let mut data = Vec::with_capacity(4 * n_per_ring);
    let mut labels = Vec::with_capacity(2 * n_per_ring);
    for (ring, radius) in [r_inner, r_outer].into_iter().enumerate() {
        for _ in 0..n_per_ring {
            let theta = 2.0 * PI * rng.uniform();
            let r = radius + noise_sd * rng.gaussian();
            data.push(r * theta.cos());
            data.push(r * theta.sin());
            labels.push(ring);
        }
    }
    Dataset::new(
        "two-rings",
        DenseMatrix::new(2 * n_per_ring, 2, data)?,
        labels,
    )
}

/// Unit-variance isotropic Gaussian blobs.
///
/// Blob `j` is centred at `j * separation` along the first axis, so every pair
/// of centres is at least `separation` apart.
pub fn gen_blobs(k: usize, n_per_blob: usize, d: usize, separation: f64, seed: u64) -> Result<Dataset> {
    if k == 0 || n_per_blob == 0 || d == 0 {
        return Err(Error::Parameter("k, n_per_blob and d must be positive".into()));
    }
    if !(separation > 0.0 && separation.is_finite()) {
        return Err(Error::Parameter(format!("separation must be > 0, got {separation}")));
    }
    let mut rng = RngStream::new(seed);
    let n = k * n_per_blob;
    let mut data = Vec::with_capacity(n * d);
    let mut labels = Vec::with_capacity(n);
    for blob in 0..k {
        for _ in 0..n_per_blob {
            for axis in 0..d {
                let centre = if axis == 0 { blob as f64 * separation } else { 0.0 };
                data.push(centre + rng.gaussian());
            }
            labels.push(blob);
        }
    }
    Dataset::new("blobs", DenseMatrix::new(n, d, data)?, labels)
}

/// Stochastic block model adjacency.
///
/// Each unordered pair is an edge with probability `p_in` inside a block and
/// `p_out` across blocks, drawn over the upper triangle in row-major order.
/// `jitter`, when given, is added to every off-diagonal entry so that all
/// degrees are positive.
pub fn gen_sbm(
    sizes: &[usize],
    p_in: f64,
    p_out: f64,
    jitter: Option<f64>,
    seed: u64,
) -> Result<DenseMatrix> {
    if !(0.0 <= p_out && p_out < p_in && p_in <= 1.0) {
        return Err(Error::Parameter(format!(
            "need 0 <= p_out < p_in <= 1, got p_in={p_in}, p_out={p_out}"
        )));
    }
    if let Some(j) = jitter {
        if !(j >= 0.0 && j.is_finite()) {
            return Err(Error::Parameter(format!("jitter must be >= 0, got {j}")));
        }
    }
    if sizes.is_empty() || sizes.contains(&0) {
        return Err(Error::Parameter("block sizes must be positive".into()));
    }
    let block = block_labels(sizes);
    let n = block.len();
    let mut rng = RngStream::new(seed);
    let mut w = DenseMatrix::zeros(n, n);
    let jitter = jitter.unwrap_or(0.0);
    for i in 0..n {
        for j in (i + 1)..n {
            let p = if block[i] == block[j] { p_in } else { p_out };
            let edge = if rng.uniform() < p { 1.0 } else { 0.0 };
            w[(i, j)] = edge + jitter;
            w[(j, i)] = edge + jitter;
        }
    }
    for i in 0..n {
        if w.row(i).iter().all(|&x| x == 0.0) {
            return Err(Error::Parameter(format!(
                "vertex {i} drew no edges; pass a positive jitter to keep every degree positive"
            )));
        }
    }
    Ok(w)
}

/// Block index of every vertex for the given block sizes.
pub fn block_labels(sizes: &[usize]) -> Vec<usize> {
    sizes
        .iter()
        .enumerate()
        .flat_map(|(b, &s)| std::iter::repeat_n(b, s))
        .collect()
}

//! Similarity graphs, their normalized Laplacian family, and normalized cuts.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{symmetric_eigh, DenseMatrix};

/// Exhaustive bipartition search limit (2^(n-1) - 1 candidates).
pub const MAX_BRUTEFORCE_VERTICES: usize = 20;
/// Default neighbour rank for the self-tuning bandwidth.
pub const DEFAULT_SELF_TUNING_NEIGHBOR: usize = 7;

const SYMMETRY_TOL: f64 = 1e-12;

/// Heat-kernel bandwidth selection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum SigmaMode {
    /// `W_ij = exp(-‖x_i - x_j‖² / σ)`.
    Fixed(f64),
    /// `σ_ij = s_i s_j` with `s_i` the distance from point `i` to its ℓ-th
    /// nearest other point.
    SelfTuning(usize),
}

impl Default for SigmaMode {
    fn default() -> Self {
        SigmaMode::SelfTuning(DEFAULT_SELF_TUNING_NEIGHBOR)
    }
}

fn squared_distances(points: &DenseMatrix) -> DenseMatrix {
    let n = points.rows();
    let mut d2 = DenseMatrix::zeros(n, n);
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let xi = points.row(i);
            (0..n)
                .map(|j| {
                    xi.iter()
                        .zip(points.row(j))
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum()
                })
                .collect()
        })
        .collect();
    for (i, row) in rows.into_iter().enumerate() {
        d2.row_mut(i).copy_from_slice(&row);
    }
    d2
}

/// Heat-kernel similarity matrix with zero diagonal.
///
/// Under [`SigmaMode::SelfTuning`] a neighbour rank larger than `n - 1` is
/// clamped to `n - 1`.
pub fn build_similarity(points: &DenseMatrix, bandwidth: SigmaMode) -> Result<DenseMatrix> {
    let n = points.rows();
    if n < 2 {
        return Err(Error::Size(format!("need at least 2 points, got {n}")));
    }
    let d2 = squared_distances(points);
    let mut w = DenseMatrix::zeros(n, n);
    match bandwidth {
        SigmaMode::Fixed(sigma) => {
            if !(sigma > 0.0 && sigma.is_finite()) {
                return Err(Error::Parameter(format!("sigma must be > 0, got {sigma}")));
            }
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        w[(i, j)] = (-d2[(i, j)] / sigma).exp();
                    }
                }
            }
        }
        SigmaMode::SelfTuning(ell) => {
            if ell == 0 {
                return Err(Error::Parameter("self-tuning neighbour rank must be >= 1".into()));
            }
            let ell = ell.min(n - 1);
            let scales: Vec<f64> = (0..n)
                .map(|i| {
                    // Distances to the other points; ties in distance are
                    // resolved by index, which does not change the value.
                    let mut others: Vec<f64> = (0..n).filter(|&j| j != i).map(|j| d2[(i, j)]).collect();
                    let (_, kth, _) = others.select_nth_unstable_by(ell - 1, f64::total_cmp);
                    kth.sqrt()
                })
                .collect();
            if let Some(index) = scales.iter().position(|&s| s == 0.0) {
                return Err(Error::Bandwidth { index });
            }
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        w[(i, j)] = (-d2[(i, j)] / (scales[i] * scales[j])).exp();
                    }
                }
            }
        }
    }
    Ok(w)
}

/// Weighted graph with its degree vector, normalized adjacency
/// `W̃ = D^{-1/2} W D^{-1/2}` and normalized Laplacian `L̃ = I - W̃`.
#[derive(Debug, Clone)]
pub struct SimilarityGraph {
    w: DenseMatrix,
    degrees: Vec<f64>,
    w_norm: DenseMatrix,
}

impl SimilarityGraph {
    pub fn n(&self) -> usize {
        self.degrees.len()
    }

    pub fn w(&self) -> &DenseMatrix {
        &self.w
    }

    pub fn degrees(&self) -> &[f64] {
        &self.degrees
    }

    /// Normalized adjacency `W̃`.
    pub fn w_norm(&self) -> &DenseMatrix {
        &self.w_norm
    }

    /// Normalized Laplacian `L̃ = I - W̃`, formed on demand.
    pub fn l_norm(&self) -> DenseMatrix {
        let n = self.n();
        DenseMatrix::from_fn(n, n, |i, j| {
            let id = if i == j { 1.0 } else { 0.0 };
            id - self.w_norm[(i, j)]
        })
    }

    /// Eigenvalues of `L̃` in descending order.
    pub fn laplacian_spectrum(&self) -> Result<Vec<f64>> {
        Ok(symmetric_eigh(&self.l_norm())?.eigenvalues)
    }

    /// Eigenvalues of `W̃` in descending order.
    pub fn adjacency_spectrum(&self) -> Result<Vec<f64>> {
        Ok(symmetric_eigh(&self.w_norm)?.eigenvalues)
    }
}

/// Validates `w` and builds the normalized matrices.
pub fn build_graph(w: DenseMatrix) -> Result<SimilarityGraph> {
    if !w.is_square() {
        return Err(Error::Shape(format!(
            "similarity matrix must be square, got {}x{}",
            w.rows(),
            w.cols()
        )));
    }
    let n = w.rows();
    if n == 0 {
        return Err(Error::Size("graph has no vertices".into()));
    }
    let scale = w.max_abs();
    let asym = w.asymmetry().unwrap_or(0.0);
    if asym > SYMMETRY_TOL * scale {
        return Err(Error::InvalidGraph(format!("W is not symmetric (max deviation {asym:e})")));
    }
    for i in 0..n {
        if w[(i, i)] != 0.0 {
            return Err(Error::InvalidGraph(format!("W[{i},{i}] = {} but the diagonal must be zero", w[(i, i)])));
        }
        if let Some(j) = w.row(i).iter().position(|&x| x < 0.0) {
            return Err(Error::InvalidGraph(format!("W[{i},{j}] is negative")));
        }
    }
    let degrees: Vec<f64> = (0..n).map(|i| w.row(i).iter().sum()).collect();
    if let Some(index) = degrees.iter().position(|&d| d <= 0.0) {
        return Err(Error::IsolatedVertex { index });
    }
    let inv_sqrt: Vec<f64> = degrees.iter().map(|d| 1.0 / d.sqrt()).collect();
    let mut w_norm = DenseMatrix::from_fn(n, n, |i, j| inv_sqrt[i] * w[(i, j)] * inv_sqrt[j]);
    // Exact symmetry, independent of rounding in the products above.
    for i in 0..n {
        for j in (i + 1)..n {
            let v = 0.5 * (w_norm[(i, j)] + w_norm[(j, i)]);
            w_norm[(i, j)] = v;
            w_norm[(j, i)] = v;
        }
    }
    Ok(SimilarityGraph { w, degrees, w_norm })
}

/// Two-sided vertex partition; `true` marks side A. Both sides are nonempty.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Bipartition {
    membership: Vec<bool>,
}

impl Bipartition {
    pub fn new(membership: Vec<bool>) -> Result<Self> {
        let a = membership.iter().filter(|&&m| m).count();
        if a == 0 || a == membership.len() {
            return Err(Error::DegeneratePartition(
                "both sides of a bipartition must be nonempty".into(),
            ));
        }
        Ok(Self { membership })
    }

    /// Vertex `i` is on side A iff bit `i` of `mask` is set.
    pub fn from_mask(mask: u64, n: usize) -> Result<Self> {
        Self::new((0..n).map(|i| mask >> i & 1 == 1).collect())
    }

    pub fn membership(&self) -> &[bool] {
        &self.membership
    }

    pub fn mask(&self) -> u64 {
        self.membership
            .iter()
            .enumerate()
            .filter(|(_, &m)| m)
            .fold(0, |acc, (i, _)| acc | 1 << i)
    }

    pub fn len(&self) -> usize {
        self.membership.len()
    }

    pub fn is_empty(&self) -> bool {
        self.membership.is_empty()
    }
}

fn check_partition(g: &SimilarityGraph, part: &Bipartition) -> Result<()> {
    if part.len() != g.n() {
        return Err(Error::Shape(format!(
            "partition over {} vertices for a graph with {}",
            part.len(),
            g.n()
        )));
    }
    Ok(())
}

/// `cut(A,B) * (1/assoc(A,V) + 1/assoc(B,V))`.
pub fn ncut(g: &SimilarityGraph, part: &Bipartition) -> Result<f64> {
    check_partition(g, part)?;
    Ok(ncut_unchecked(g, part.membership()))
}

fn ncut_unchecked(g: &SimilarityGraph, side_a: &[bool]) -> f64 {
    let n = g.n();
    let mut cut = 0.0;
    let mut assoc_a = 0.0;
    let mut assoc_b = 0.0;
    for i in 0..n {
        if side_a[i] {
            assoc_a += g.degrees[i];
            let row = g.w.row(i);
            for j in 0..n {
                if !side_a[j] {
                    cut += row[j];
                }
            }
        } else {
            assoc_b += g.degrees[i];
        }
    }
    cut * (1.0 / assoc_a + 1.0 / assoc_b)
}

/// Global Ncut minimum by enumerating every bipartition.
///
/// Vertex `n-1` is pinned to side B so each partition is visited once. Ties
/// go to the smallest membership bitmask.
pub fn min_ncut_bruteforce(g: &SimilarityGraph) -> Result<(Bipartition, f64)> {
    let n = g.n();
    if n > MAX_BRUTEFORCE_VERTICES {
        return Err(Error::SizeGuard {
            size: n,
            limit: MAX_BRUTEFORCE_VERTICES,
        });
    }
    if n < 2 {
        return Err(Error::Size("a bipartition needs at least 2 vertices".into()));
    }
    let last = 1u64 << (n - 1);
    let (value, mask) = (1..last)
        .into_par_iter()
        .map(|mask| {
            let side: Vec<bool> = (0..n).map(|i| mask >> i & 1 == 1).collect();
            (ncut_unchecked(g, &side), mask)
        })
        .reduce(
            || (f64::INFINITY, u64::MAX),
            |a, b| if (b.0, b.1) < (a.0, a.1) { b } else { a },
        );
    Ok((Bipartition::from_mask(mask, n)?, value))
}

/// Rayleigh quotient `yᵀ(D - W)y / yᵀDy` of the generalized partition
/// indicator `y_i = 1` on A and `y_i = -assoc(A)/assoc(B)` on B.
///
/// For this `y` the quotient equals [`ncut`] exactly.
pub fn rayleigh_ncut(g: &SimilarityGraph, part: &Bipartition) -> Result<f64> {
    check_partition(g, part)?;
    let side = part.membership();
    let n = g.n();
    let assoc_a: f64 = (0..n).filter(|&i| side[i]).map(|i| g.degrees[i]).sum();
    let assoc_b: f64 = (0..n).filter(|&i| !side[i]).map(|i| g.degrees[i]).sum();
    let b = assoc_a / assoc_b;
    let y: Vec<f64> = side.iter().map(|&a| if a { 1.0 } else { -b }).collect();

    let mut numerator = 0.0;
    let mut denominator = 0.0;
    for i in 0..n {
        let wy: f64 = g.w.row(i).iter().zip(&y).map(|(w, yj)| w * yj).sum();
        numerator += y[i] * (g.degrees[i] * y[i] - wy);
        denominator += g.degrees[i] * y[i] * y[i];
    }
    Ok(numerator / denominator)
}

/// Components of the graph whose edges are entries strictly above
/// `edge_threshold`.
pub fn connected_components(g: &SimilarityGraph, edge_threshold: f64) -> usize {
    let n = g.n();
    let mut seen = vec![false; n];
    let mut components = 0;
    let mut stack = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        components += 1;
        seen[start] = true;
        stack.push(start);
        while let Some(u) = stack.pop() {
            for (v, &wt) in g.w.row(u).iter().enumerate() {
                if wt > edge_threshold && !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
    }
    components
}

/// Both sides of Cheeger's inequality around the optimal Ncut.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CheegerReport {
    /// Second-smallest eigenvalue of `L̃`.
    pub lambda: f64,
    pub lower: f64,
    pub ncut_opt: f64,
    pub upper: f64,
}

impl CheegerReport {
    pub fn holds(&self) -> bool {
        self.lower <= self.ncut_opt && self.ncut_opt <= self.upper
    }
}

/// `λ/2 <= min Ncut <= 2√(2λ)` with `λ` the second-smallest eigenvalue of `L̃`.
pub fn cheeger_check(g: &SimilarityGraph) -> Result<CheegerReport> {
    if g.n() > MAX_BRUTEFORCE_VERTICES {
        return Err(Error::SizeGuard {
            size: g.n(),
            limit: MAX_BRUTEFORCE_VERTICES,
        });
    }
    let comps = connected_components(g, 0.0);
    if comps != 1 {
        return Err(Error::InvalidGraph(format!(
            "Cheeger check needs a connected graph, found {comps} components"
        )));
    }
    let (_, ncut_opt) = min_ncut_bruteforce(g)?;
    let spectrum = g.laplacian_spectrum()?;
    let lambda = spectrum[spectrum.len() - 2].max(0.0);
    Ok(CheegerReport {
        lambda,
        lower: 0.5 * lambda,
        ncut_opt,
        upper: 2.0 * (2.0 * lambda).sqrt(),
    })
}

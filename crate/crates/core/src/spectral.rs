//! Exact and power-method spectral embeddings, eigen-gap diagnostics and
//! empirical checks of the projection and k-means approximation bounds.

use rayon::prelude::*;
use serde::Serialize;

use crate::clustering::{
    bruteforce_kmeans, kmeans_objective, lloyd_kmeans_with, max_bruteforce_points, LloydOptions,
};
use crate::dataio::{derive_seed, RngStream};
use crate::error::{Error, Result};
use crate::graph::SimilarityGraph;
use crate::linalg::{gram_schmidt, symmetric_eigh, thin_svd_via_gram, DenseMatrix};

/// Columns of an embedding must satisfy `‖YᵀY - I‖_F <= ORTHONORMAL_TOL`.
pub const ORTHONORMAL_TOL: f64 = 1e-8;
/// Relative size below which `σ_{k+1}` counts as zero and the gap as infinite.
const ZERO_SINGULAR_TOL: f64 = 1e-14;
/// Eigenvalue separation below which the exact embedding logs a near-tie.
const NEAR_TIE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum EmbeddingKind {
    Exact,
    Power { p: usize, seed: u64 },
}

/// An `n x k` matrix with orthonormal columns; row `i` is the new coordinate
/// of point `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    y: DenseMatrix,
    kind: EmbeddingKind,
}

impl Embedding {
    pub fn new(y: DenseMatrix, kind: EmbeddingKind) -> Result<Self> {
        let err = orthonormality_error(&y)?;
        if err > ORTHONORMAL_TOL {
            return Err(Error::Parameter(format!(
                "embedding columns are not orthonormal (‖YᵀY - I‖_F = {err:e})"
            )));
        }
        Ok(Self { y, kind })
    }

    pub fn y(&self) -> &DenseMatrix {
        &self.y
    }

    pub fn into_matrix(self) -> DenseMatrix {
        self.y
    }

    pub fn kind(&self) -> EmbeddingKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.y.rows()
    }

    pub fn k(&self) -> usize {
        self.y.cols()
    }

    /// The `n x n` orthogonal projector `YYᵀ`.
    pub fn projector(&self) -> DenseMatrix {
        self.y.matmul(&self.y.transpose()).expect("conformant by construction")
    }
}

fn orthonormality_error(y: &DenseMatrix) -> Result<f64> {
    Ok(y.t_matmul(y)?.sub(&DenseMatrix::identity(y.cols()))?.frobenius_norm())
}

fn check_k(g: &SimilarityGraph, k: usize) -> Result<()> {
    if k == 0 || k >= g.n() {
        return Err(Error::Parameter(format!(
            "k must satisfy 1 <= k < n = {}, got {k}",
            g.n()
        )));
    }
    Ok(())
}

/// Eigenvectors of `W̃` for its `k` largest algebraic eigenvalues.
///
/// A gap `λ_k - λ_{k+1}` below 1e-10 makes the subspace ill-defined; that is
/// logged as a warning and the computed basis is returned anyway.
pub fn exact_embedding(g: &SimilarityGraph, k: usize) -> Result<Embedding> {
    check_k(g, k)?;
    let eig = symmetric_eigh(g.w_norm())?;
    let gap = eig.eigenvalues[k - 1] - eig.eigenvalues[k];
    if gap < NEAR_TIE_TOL {
        log::warn!(
            "eigenvalues {} and {} of the normalized adjacency are tied within {gap:e}; \
             the top-{k} eigenspace is not unique",
            k,
            k + 1
        );
    }
    Embedding::new(eig.eigenvectors.leading_columns(k), EmbeddingKind::Exact)
}

/// How the power iterate is kept well conditioned.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Orthonormalization {
    /// Modified Gram-Schmidt after every multiplication by `W̃`.
    #[default]
    EveryStep,
    /// Form `B = W̃^{2p+1} S` directly and orthonormalize once at the end.
    /// Only usable for small `p`: the columns of `B` align quickly.
    Never,
}

/// Gaussian start matrix `S` (`n x k`), filled row-major from `seed`.
pub fn gaussian_start(n: usize, k: usize, seed: u64) -> DenseMatrix {
    let mut rng = RngStream::new(seed);
    DenseMatrix::from_fn(n, k, |_, _| rng.gaussian())
}

/// Left singular vectors of `B = W̃^{2p+1} S` with Gaussian `S`.
pub fn power_embedding(g: &SimilarityGraph, k: usize, p: usize, seed: u64) -> Result<Embedding> {
    power_embedding_with(g, k, p, seed, Orthonormalization::EveryStep)
}

/// [`power_embedding`] with an explicit stabilization strategy.
///
/// Both strategies span the same subspace in exact arithmetic.
pub fn power_embedding_with(
    g: &SimilarityGraph,
    k: usize,
    p: usize,
    seed: u64,
    ortho: Orthonormalization,
) -> Result<Embedding> {
    check_k(g, k)?;
    let steps = 2 * p + 1;
    let w = g.w_norm();
    let mut q = gaussian_start(g.n(), k, seed);
    for step in 1..=steps {
        q = w.matmul(&q)?;
        if ortho == Orthonormalization::EveryStep {
            q = gram_schmidt(&q).map_err(|e| Error::RankCollapse {
                step,
                source: Box::new(e),
            })?;
        }
    }
    let svd = thin_svd_via_gram(&q).map_err(|e| Error::RankCollapse {
        step: steps,
        source: Box::new(e),
    })?;
    if svd.rank_used < k {
        return Err(Error::RankCollapse {
            step: steps,
            source: Box::new(Error::DegenerateRank(format!(
                "iterate has numerical rank {} < k = {k}",
                svd.rank_used
            ))),
        });
    }
    Embedding::new(svd.left_vectors, EmbeddingKind::Power { p, seed })
}

/// `‖AAᵀ - BBᵀ‖_F` for embeddings of equal shape.
///
/// Evaluated as `√2 · ‖B - A(AᵀB)‖_F`, which equals the projector difference
/// for orthonormal `A` and `B` of equal rank but does not lose accuracy to
/// cancellation when the subspaces nearly coincide.
pub fn projection_distance(a: &Embedding, b: &Embedding) -> Result<f64> {
    if a.y.shape() != b.y.shape() {
        return Err(Error::Shape(format!(
            "embeddings are {:?} and {:?}",
            a.y.shape(),
            b.y.shape()
        )));
    }
    let atb = a.y.t_matmul(&b.y)?;
    let residual = b.y.sub(&a.y.matmul(&atb)?)?;
    Ok(std::f64::consts::SQRT_2 * residual.frobenius_norm())
}

/// Explicit `AAᵀ - BBᵀ`.
pub fn projector_difference(a: &Embedding, b: &Embedding) -> Result<DenseMatrix> {
    if a.y.shape() != b.y.shape() {
        return Err(Error::Shape(format!(
            "embeddings are {:?} and {:?}",
            a.y.shape(),
            b.y.shape()
        )));
    }
    a.projector().sub(&b.projector())
}

/// Spectrum of `W̃` and the multiplicative gap `γ_k = σ_k / σ_{k+1}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapReport {
    /// `λ_i(W̃)`, descending.
    pub eigenvalues_wnorm: Vec<f64>,
    /// `σ_i(W̃) = |λ|` sorted descending.
    pub singular_values: Vec<f64>,
    /// `+inf` when `σ_{k+1}` is numerically zero.
    pub gamma_k: f64,
    pub k: usize,
    /// The `k` largest eigenvalues are not the `k` largest in magnitude, so
    /// the power method targets a different subspace than the exact
    /// embedding.
    pub order_mismatch: bool,
    pub infinite: bool,
}

impl GapReport {
    /// Builds the report from `W̃`'s eigenvalues in descending order.
    pub fn from_spectrum(eigenvalues_wnorm: Vec<f64>, k: usize) -> Result<Self> {
        let n = eigenvalues_wnorm.len();
        if k == 0 || k >= n {
            return Err(Error::Parameter(format!("k must satisfy 1 <= k < n = {n}, got {k}")));
        }
        let mut singular_values: Vec<f64> = eigenvalues_wnorm.iter().map(|l| l.abs()).collect();
        singular_values.sort_by(|a, b| b.total_cmp(a));
        let (top, next) = (singular_values[k - 1], singular_values[k]);
        let infinite = next <= ZERO_SINGULAR_TOL * singular_values[0];
        let gamma_k = if infinite { f64::INFINITY } else { top / next };

        let tol = 1e-12 * singular_values[0].max(1.0);
        let weakest_top = eigenvalues_wnorm[..k].iter().map(|l| l.abs()).fold(f64::INFINITY, f64::min);
        let strongest_rest = eigenvalues_wnorm[k..].iter().map(|l| l.abs()).fold(0.0, f64::max);
        let order_mismatch = weakest_top + tol < strongest_rest;

        Ok(Self {
            eigenvalues_wnorm,
            singular_values,
            gamma_k,
            k,
            order_mismatch,
            infinite,
        })
    }

    /// `λ_i(L̃)` in descending order, from `λ_i(W̃) = 1 - λ_{n-i+1}(L̃)`.
    pub fn laplacian_eigenvalues(&self) -> Vec<f64> {
        self.eigenvalues_wnorm.iter().rev().map(|l| 1.0 - l).collect()
    }
}

pub fn gamma_k(g: &SimilarityGraph, k: usize) -> Result<GapReport> {
    check_k(g, k)?;
    GapReport::from_spectrum(g.adjacency_spectrum()?, k)
}

fn check_probability(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0 && v < 1.0) {
        return Err(Error::Parameter(format!("{name} must lie in (0, 1), got {v}")));
    }
    Ok(())
}

/// Smallest `p >= 0` with `p >= ½ ln(4 n √k / (ε δ)) / ln γ`.
pub fn required_p(n: usize, k: usize, epsilon: f64, delta: f64, gamma: f64) -> Result<usize> {
    check_probability("epsilon", epsilon)?;
    check_probability("delta", delta)?;
    if n == 0 || k == 0 {
        return Err(Error::Parameter("n and k must be positive".into()));
    }
    if gamma.is_nan() || gamma <= 1.0 {
        return Err(Error::Gap { gamma });
    }
    if gamma.is_infinite() {
        return Ok(0);
    }
    let numerator = 0.5 * (4.0 * n as f64 * (k as f64).sqrt() / (epsilon * delta)).ln();
    let p = (numerator / gamma.ln()).ceil();
    Ok(if p > 0.0 { p as usize } else { 0 })
}

/// `f(x) = ½ ln(4·10⁹) / ln(2 - 2x)`: iterations needed as the `(n-k)`-th
/// Laplacian eigenvalue is held at ½ and the `(n-k+1)`-th grows to `x`.
pub fn fx(x: f64) -> Result<f64> {
    if !(0.0..0.5).contains(&x) {
        return Err(Error::Domain(format!("x must lie in [0, 0.5), got {x}")));
    }
    Ok(0.5 * 4e9f64.ln() / (2.0 - 2.0 * x).ln())
}

pub fn fx_curve(xs: &[f64]) -> Result<Vec<(f64, f64)>> {
    xs.iter().map(|&x| Ok((x, fx(x)?))).collect()
}

/// Whether the k-means side of a bound check used an exact oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    /// Exhaustive k-means on both sides (γ = 1).
    Exact,
    /// Lloyd on both sides; γ is unknown and 1 is plugged in.
    Heuristic,
}

/// One trial of the projection bound and, optionally, the k-means bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub seed: u64,
    pub epsilon: f64,
    pub delta: f64,
    pub gamma_k: f64,
    pub p_required: usize,
    pub p_used: usize,
    pub proj_dist: f64,
    pub lemma1_satisfied: bool,
    pub verdict: Option<Verdict>,
    /// `‖Y - X̃X̃ᵀY‖_F²` for the clustering found on the rows of `Ỹ`.
    pub theorem2_lhs: Option<f64>,
    /// `(1 + 4ε)·γ·F_opt + 4ε²`.
    pub theorem2_rhs: Option<f64>,
    pub theorem2_satisfied: Option<bool>,
    /// Optimal (or best found) k-means objective on the rows of `Y`.
    pub f_opt: Option<f64>,
    /// `γ·(√F_opt + 2ε)²`, the bound before `√F_opt <= F_opt` is applied.
    pub theorem2_sqrt_rhs: Option<f64>,
    pub theorem2_sqrt_satisfied: Option<bool>,
    /// `(1 + 8ε)·γ·F_opt`, reported only when `ε <= F_opt`.
    pub relative_rhs: Option<f64>,
    pub relative_satisfied: Option<bool>,
}

/// Shared per-graph state for repeated bound trials: the exact embedding,
/// the gap and the required iteration count.
#[derive(Debug, Clone)]
pub struct BoundContext<'g> {
    graph: &'g SimilarityGraph,
    k: usize,
    epsilon: f64,
    delta: f64,
    exact: Embedding,
    gap: GapReport,
    p_required: usize,
}

impl<'g> BoundContext<'g> {
    /// Fails with [`Error::OrderMismatch`] when the algebraic and magnitude
    /// top-k sets differ and with [`Error::Gap`] when `γ_k <= 1`.
    pub fn new(graph: &'g SimilarityGraph, k: usize, epsilon: f64, delta: f64) -> Result<Self> {
        check_k(graph, k)?;
        check_probability("epsilon", epsilon)?;
        check_probability("delta", delta)?;
        let gap = gamma_k(graph, k)?;
        if gap.order_mismatch {
            return Err(Error::OrderMismatch { k });
        }
        let p_required = required_p(graph.n(), k, epsilon, delta, gap.gamma_k)?;
        let exact = exact_embedding(graph, k)?;
        Ok(Self {
            graph,
            k,
            epsilon,
            delta,
            exact,
            gap,
            p_required,
        })
    }

    pub fn gap(&self) -> &GapReport {
        &self.gap
    }

    pub fn exact(&self) -> &Embedding {
        &self.exact
    }

    pub fn p_required(&self) -> usize {
        self.p_required
    }

    /// Runs the power method with `p_override` (or the required `p`) and
    /// compares its projector with the exact one.
    pub fn lemma1(&self, seed: u64, p_override: Option<usize>) -> Result<BoundReport> {
        self.lemma1_with_embedding(seed, p_override).map(|(r, _)| r)
    }

    fn lemma1_with_embedding(&self, seed: u64, p_override: Option<usize>) -> Result<(BoundReport, Embedding)> {
        let p_used = p_override.unwrap_or(self.p_required);
        let approx = power_embedding(self.graph, self.k, p_used, seed)?;
        let proj_dist = projection_distance(&self.exact, &approx)?;
        let report = BoundReport {
            seed,
            epsilon: self.epsilon,
            delta: self.delta,
            gamma_k: self.gap.gamma_k,
            p_required: self.p_required,
            p_used,
            proj_dist,
            lemma1_satisfied: proj_dist <= self.epsilon,
            verdict: None,
            theorem2_lhs: None,
            theorem2_rhs: None,
            theorem2_satisfied: None,
            f_opt: None,
            theorem2_sqrt_rhs: None,
            theorem2_sqrt_satisfied: None,
            relative_rhs: None,
            relative_satisfied: None,
        };
        Ok((report, approx))
    }

    /// Projection trial plus the k-means comparison: cluster the rows of
    /// `Ỹ`, score that clustering on `Y`, and compare with the optimum on
    /// `Y`.
    ///
    /// Uses exhaustive k-means (γ = 1) when `n` is within its size guard and
    /// Lloyd with default options otherwise.
    pub fn theorem2(&self, seed: u64, p_override: Option<usize>) -> Result<BoundReport> {
        let (mut report, approx) = self.lemma1_with_embedding(seed, p_override)?;
        let y = self.exact.y();
        let exhaustive = self.graph.n() <= max_bruteforce_points(self.k);
        let (labels, f_opt, verdict) = if exhaustive {
            let on_approx = bruteforce_kmeans(approx.y(), self.k)?;
            let on_exact = bruteforce_kmeans(y, self.k)?;
            (on_approx.clustering, on_exact.objective, Verdict::Exact)
        } else {
            let opts = LloydOptions::default();
            let on_approx = lloyd_kmeans_with(approx.y(), self.k, &opts, derive_seed(seed, 1))?;
            let on_exact = lloyd_kmeans_with(y, self.k, &opts, derive_seed(seed, 2))?;
            (on_approx.clustering, on_exact.objective, Verdict::Heuristic)
        };
        let lhs = kmeans_objective(y, &labels)?;
        let eps = self.epsilon;
        let gamma = 1.0;
        // Floating-point slack for comparisons of O(1) objectives.
        let slack = 1e-12;
        let rhs = (1.0 + 4.0 * eps) * gamma * f_opt + 4.0 * eps * eps;
        let sqrt_rhs = gamma * (f_opt.sqrt() + 2.0 * eps).powi(2);
        report.verdict = Some(verdict);
        report.theorem2_lhs = Some(lhs);
        report.theorem2_rhs = Some(rhs);
        report.theorem2_satisfied = Some(lhs <= rhs + slack);
        report.f_opt = Some(f_opt);
        report.theorem2_sqrt_rhs = Some(sqrt_rhs);
        report.theorem2_sqrt_satisfied = Some(lhs <= sqrt_rhs + slack);
        if eps <= f_opt {
            let rel = (1.0 + 8.0 * eps) * gamma * f_opt;
            report.relative_rhs = Some(rel);
            report.relative_satisfied = Some(lhs <= rel + slack);
        }
        Ok(report)
    }

    /// Runs `trials` independent trials in parallel; trial `t` uses seed
    /// `derive_seed(master_seed, t)`.
    pub fn run_trials(
        &self,
        master_seed: u64,
        trials: usize,
        with_kmeans: bool,
        p_override: Option<usize>,
    ) -> Result<Vec<BoundReport>> {
        (0..trials as u64)
            .into_par_iter()
            .map(|t| {
                let seed = derive_seed(master_seed, t);
                if with_kmeans {
                    self.theorem2(seed, p_override)
                } else {
                    self.lemma1(seed, p_override)
                }
            })
            .collect()
    }
}

pub fn lemma1_check(g: &SimilarityGraph, k: usize, epsilon: f64, delta: f64, seed: u64) -> Result<BoundReport> {
    BoundContext::new(g, k, epsilon, delta)?.lemma1(seed, None)
}

/// [`lemma1_check`] with the iteration count forced to `p`.
pub fn lemma1_check_with(
    g: &SimilarityGraph,
    k: usize,
    epsilon: f64,
    delta: f64,
    seed: u64,
    p: usize,
) -> Result<BoundReport> {
    BoundContext::new(g, k, epsilon, delta)?.lemma1(seed, Some(p))
}

pub fn theorem2_check(g: &SimilarityGraph, k: usize, epsilon: f64, delta: f64, seed: u64) -> Result<BoundReport> {
    BoundContext::new(g, k, epsilon, delta)?.theorem2(seed, None)
}

//! End-to-end spectral clustering: similarity graph, embedding, k-means.

use std::time::Instant;

use serde::Serialize;

use crate::clustering::{lloyd_kmeans_with, KmeansResult, LloydOptions};
use crate::dataio::derive_seed;
use crate::error::Result;
use crate::graph::{build_graph, build_similarity, SigmaMode, SimilarityGraph};
use crate::linalg::DenseMatrix;
use crate::spectral::{exact_embedding, gamma_k, power_embedding, required_p, Embedding, GapReport};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum EmbeddingMode {
    Exact,
    Power { p: usize },
    /// Power method with `p` from the measured gap.
    Auto { epsilon: f64, delta: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipelineConfig {
    pub k: usize,
    pub mode: EmbeddingMode,
    pub lloyd: LloydOptions,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct PipelineRun {
    pub embedding: Embedding,
    pub p_used: Option<usize>,
    /// Present in auto mode, where the gap is needed to pick `p`.
    pub gap: Option<GapReport>,
    pub kmeans: KmeansResult,
    /// Wall time of the embedding step alone (the gap computation in auto
    /// mode is excluded).
    pub embed_seconds: f64,
    pub kmeans_seconds: f64,
}

/// Embeds the graph and runs Lloyd on the rows of the embedding.
///
/// The power method draws its start matrix from `derive_seed(seed, 0)` and
/// Lloyd from `derive_seed(seed, 1)`.
pub fn run_on_graph(g: &SimilarityGraph, config: &PipelineConfig) -> Result<PipelineRun> {
    let power_seed = derive_seed(config.seed, 0);
    let (p_used, gap) = match config.mode {
        EmbeddingMode::Exact => (None, None),
        EmbeddingMode::Power { p } => (Some(p), None),
        EmbeddingMode::Auto { epsilon, delta } => {
            let gap = gamma_k(g, config.k)?;
            let p = required_p(g.n(), config.k, epsilon, delta, gap.gamma_k)?;
            (Some(p), Some(gap))
        }
    };

    let start = Instant::now();
    let embedding = match p_used {
        None => exact_embedding(g, config.k)?,
        Some(p) => power_embedding(g, config.k, p, power_seed)?,
    };
    let embed_seconds = start.elapsed().as_secs_f64();

    let start = Instant::now();
    let kmeans = lloyd_kmeans_with(embedding.y(), config.k, &config.lloyd, derive_seed(config.seed, 1))?;
    let kmeans_seconds = start.elapsed().as_secs_f64();

    Ok(PipelineRun {
        embedding,
        p_used,
        gap,
        kmeans,
        embed_seconds,
        kmeans_seconds,
    })
}

/// Builds the heat-kernel graph on `points` and runs [`run_on_graph`].
pub fn run_on_points(points: &DenseMatrix, sigma: SigmaMode, config: &PipelineConfig) -> Result<PipelineRun> {
    let g = build_graph(build_similarity(points, sigma)?)?;
    run_on_graph(&g, config)
}

/// Least-squares line `y = slope·x + intercept` and its coefficient of
/// determination.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// `None` for fewer than two points or constant `xs`. Constant `ys` fit
/// perfectly (R² = 1).
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Option<LinearFit> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Some(LinearFit {
        slope,
        intercept,
        r_squared,
    })
}

/// Index of the best score among entries whose time does not exceed
/// `budget`; ties go to the earliest entry.
pub fn best_under_budget(scores: &[f64], times: &[f64], budget: f64) -> Option<usize> {
    scores
        .iter()
        .zip(times)
        .enumerate()
        .filter(|(_, (_, &t))| t <= budget)
        .fold(None, |best: Option<(usize, f64)>, (i, (&s, _))| match best {
            Some((_, b)) if b >= s => best,
            _ => Some((i, s)),
        })
        .map(|(i, _)| i)
}

//! k-means in indicator-matrix form, Lloyd's heuristic, an exhaustive
//! oracle, and normalized mutual information.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::dataio::RngStream;
use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

pub const DEFAULT_REPLICATES: usize = 10;
pub const DEFAULT_MAX_ITER: usize = 100;
/// Largest number of canonical labelings `bruteforce_kmeans` will visit.
/// Admits n <= 14 for k = 2 and n <= 10 for k = 3.
pub const MAX_BRUTEFORCE_LABELINGS: u128 = 10_000;

/// Hard assignment of `n` items to clusters `0..k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Clustering {
    labels: Vec<usize>,
    k: usize,
}

impl Clustering {
    pub fn new(labels: Vec<usize>, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::Parameter("a clustering needs k >= 1".into()));
        }
        if let Some(i) = labels.iter().position(|&l| l >= k) {
            return Err(Error::Parameter(format!(
                "label {} at position {i} is outside 0..{k}",
                labels[i]
            )));
        }
        Ok(Self { labels, k })
    }

    /// Uses `max(label) + 1` clusters.
    pub fn from_labels(labels: Vec<usize>) -> Self {
        let k = labels.iter().max().map_or(1, |m| m + 1);
        Self { labels, k }
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn into_labels(self) -> Vec<usize> {
        self.labels
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        sizes
    }

    fn require_nonempty(&self) -> Result<Vec<usize>> {
        let sizes = self.sizes();
        if let Some(j) = sizes.iter().position(|&s| s == 0) {
            return Err(Error::DegenerateClustering(format!("cluster {j} is empty")));
        }
        Ok(sizes)
    }
}

/// `X_ij = 1/√s_j` when item `i` is in cluster `j`, else 0.
#[derive(Debug, Clone, PartialEq)]
pub struct IndicatorMatrix {
    pub x: DenseMatrix,
}

pub fn indicator_from_labels(c: &Clustering) -> Result<IndicatorMatrix> {
    let sizes = c.require_nonempty()?;
    let mut x = DenseMatrix::zeros(c.len(), c.k());
    for (i, &l) in c.labels.iter().enumerate() {
        x[(i, l)] = 1.0 / (sizes[l] as f64).sqrt();
    }
    Ok(IndicatorMatrix { x })
}

fn check_rows(data: &DenseMatrix, c: &Clustering) -> Result<()> {
    if data.rows() != c.len() {
        return Err(Error::Shape(format!(
            "{} data rows but {} labels",
            data.rows(),
            c.len()
        )));
    }
    Ok(())
}

fn centroids(data: &DenseMatrix, labels: &[usize], k: usize) -> (DenseMatrix, Vec<usize>) {
    let d = data.cols();
    let mut sums = DenseMatrix::zeros(k, d);
    let mut counts = vec![0usize; k];
    for (i, &l) in labels.iter().enumerate() {
        counts[l] += 1;
        for (s, &x) in sums.row_mut(l).iter_mut().zip(data.row(i)) {
            *s += x;
        }
    }
    for (j, &cnt) in counts.iter().enumerate() {
        if cnt > 0 {
            for s in sums.row_mut(j) {
                *s /= cnt as f64;
            }
        }
    }
    (sums, counts)
}

#[inline]
fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn centroid_cost(data: &DenseMatrix, labels: &[usize], centres: &DenseMatrix) -> f64 {
    labels
        .iter()
        .enumerate()
        .map(|(i, &l)| sq_dist(data.row(i), centres.row(l)))
        .sum()
}

/// Sum of squared distances from each row to its cluster centroid.
///
/// Equal to `‖Y - XXᵀY‖_F²` for the indicator matrix `X` of `c`; see
/// [`kmeans_objective_indicator`].
pub fn kmeans_objective(data: &DenseMatrix, c: &Clustering) -> Result<f64> {
    check_rows(data, c)?;
    c.require_nonempty()?;
    let (centres, _) = centroids(data, &c.labels, c.k);
    let value = centroid_cost(data, &c.labels, &centres);
    debug_assert!({
        let other = kmeans_objective_indicator(data, c)?;
        (value - other).abs() <= 1e-9 * value.max(1.0)
    });
    Ok(value)
}

/// `‖Y - XXᵀY‖_F²` evaluated through the indicator matrix.
pub fn kmeans_objective_indicator(data: &DenseMatrix, c: &Clustering) -> Result<f64> {
    check_rows(data, c)?;
    let x = indicator_from_labels(c)?.x;
    let xty = x.t_matmul(data)?;
    let projected = x.matmul(&xty)?;
    Ok(data.sub(&projected)?.frobenius_norm().powi(2))
}

/// Output of a k-means solver.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KmeansResult {
    pub clustering: Clustering,
    pub objective: f64,
    pub iterations: usize,
    pub replicate_index: usize,
}

/// Initial centroid choice for Lloyd's algorithm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum Seeding {
    /// `k` distinct rows chosen uniformly.
    #[default]
    Uniform,
    /// First row uniform, then rows drawn with probability proportional to
    /// squared distance from the nearest chosen centroid.
    DSquared,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LloydOptions {
    pub replicates: usize,
    pub max_iter: usize,
    pub seeding: Seeding,
}

impl Default for LloydOptions {
    fn default() -> Self {
        Self {
            replicates: DEFAULT_REPLICATES,
            max_iter: DEFAULT_MAX_ITER,
            seeding: Seeding::Uniform,
        }
    }
}

/// A single Lloyd replicate together with the objective after every update.
#[derive(Debug, Clone)]
pub struct LloydTrace {
    pub result: KmeansResult,
    pub history: Vec<f64>,
}

fn validate_k(data: &DenseMatrix, k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::Parameter("k must be at least 1".into()));
    }
    if k > data.rows() {
        return Err(Error::Parameter(format!(
            "k = {k} exceeds the number of points ({})",
            data.rows()
        )));
    }
    Ok(())
}

fn seed_centroids(data: &DenseMatrix, k: usize, seeding: Seeding, rng: &mut RngStream) -> DenseMatrix {
    let n = data.rows();
    let picks = match seeding {
        Seeding::Uniform => rng.sample_distinct(n, k),
        Seeding::DSquared => {
            let mut picks = vec![rng.below(n)];
            let mut best: Vec<f64> = (0..n).map(|i| sq_dist(data.row(i), data.row(picks[0]))).collect();
            while picks.len() < k {
                let total: f64 = best.iter().sum();
                let next = if total > 0.0 {
                    let target = rng.uniform() * total;
                    let mut acc = 0.0;
                    let mut chosen = n - 1;
                    for (i, &b) in best.iter().enumerate() {
                        acc += b;
                        if acc > target {
                            chosen = i;
                            break;
                        }
                    }
                    chosen
                } else {
                    let free: Vec<usize> = (0..n).filter(|i| !picks.contains(i)).collect();
                    free[rng.below(free.len())]
                };
                picks.push(next);
                for (i, b) in best.iter_mut().enumerate() {
                    *b = b.min(sq_dist(data.row(i), data.row(next)));
                }
            }
            picks
        }
    };
    DenseMatrix::from_fn(k, data.cols(), |j, c| data[(picks[j], c)])
}

fn nearest(point: &[f64], centres: &DenseMatrix) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for j in 0..centres.rows() {
        let d = sq_dist(point, centres.row(j));
        if d < best.1 {
            best = (j, d);
        }
    }
    best
}

/// One Lloyd replicate from the given random stream.
///
/// Alternates nearest-centroid assignment (ties to the lowest cluster index)
/// with centroid updates until the labels stop changing or `max_iter` rounds
/// have run. An empty cluster takes over the point farthest from its own
/// centroid among clusters with more than one member.
pub fn lloyd_trace(
    data: &DenseMatrix,
    k: usize,
    max_iter: usize,
    seeding: Seeding,
    rng: &mut RngStream,
) -> Result<LloydTrace> {
    validate_k(data, k)?;
    let n = data.rows();
    let mut centres = seed_centroids(data, k, seeding, rng);
    let mut labels: Vec<usize> = vec![usize::MAX; n];
    let mut history = Vec::new();
    let mut iterations = 0;

    for _ in 0..max_iter.max(1) {
        iterations += 1;
        let mut next = Vec::with_capacity(n);
        let mut dist = Vec::with_capacity(n);
        for i in 0..n {
            let (j, d) = nearest(data.row(i), &centres);
            next.push(j);
            dist.push(d);
        }
        repair_empty_clusters(data, &mut next, &mut dist, &mut centres, k);
        if next == labels {
            break;
        }
        labels = next;
        let (means, _) = centroids(data, &labels, k);
        centres = means;
        history.push(centroid_cost(data, &labels, &centres));
    }

    let clustering = Clustering { labels, k };
    let objective = kmeans_objective(data, &clustering)?;
    Ok(LloydTrace {
        result: KmeansResult {
            clustering,
            objective,
            iterations,
            replicate_index: 0,
        },
        history,
    })
}

fn repair_empty_clusters(
    data: &DenseMatrix,
    labels: &mut [usize],
    dist: &mut [f64],
    centres: &mut DenseMatrix,
    k: usize,
) {
    loop {
        let mut sizes = vec![0usize; k];
        for &l in labels.iter() {
            sizes[l] += 1;
        }
        let Some(empty) = sizes.iter().position(|&s| s == 0) else {
            return;
        };
        let mut donor = None;
        let mut far = f64::NEG_INFINITY;
        for (i, &l) in labels.iter().enumerate() {
            if sizes[l] > 1 && dist[i] > far {
                far = dist[i];
                donor = Some(i);
            }
        }
        // k <= n guarantees some cluster has a spare member.
        let i = donor.expect("a cluster with more than one member exists when k <= n");
        labels[i] = empty;
        dist[i] = 0.0;
        centres.row_mut(empty).copy_from_slice(data.row(i));
    }
}

/// Lloyd's algorithm with uniform seeding, keeping the best of `replicates`
/// independent runs.
pub fn lloyd_kmeans(
    data: &DenseMatrix,
    k: usize,
    replicates: usize,
    max_iter: usize,
    seed: u64,
) -> Result<KmeansResult> {
    lloyd_kmeans_with(
        data,
        k,
        &LloydOptions {
            replicates,
            max_iter,
            seeding: Seeding::Uniform,
        },
        seed,
    )
}

/// Replicate `r` draws from the stream derived from `(seed, r)`; the best
/// objective wins, ties to the lower replicate index.
pub fn lloyd_kmeans_with(
    data: &DenseMatrix,
    k: usize,
    options: &LloydOptions,
    seed: u64,
) -> Result<KmeansResult> {
    validate_k(data, k)?;
    let replicates = options.replicates.max(1);
    let runs = (0..replicates)
        .into_par_iter()
        .map(|r| {
            let mut rng = RngStream::derive(seed, r as u64);
            lloyd_trace(data, k, options.max_iter, options.seeding, &mut rng).map(|t| {
                let mut res = t.result;
                res.replicate_index = r;
                res
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(runs
        .into_iter()
        .reduce(|best, r| if r.objective < best.objective { r } else { best })
        .expect("at least one replicate"))
}

/// Stirling number of the second kind, saturating.
fn stirling2(n: usize, k: usize) -> u128 {
    let mut row = vec![0u128; k + 1];
    row[0] = 1;
    for _ in 0..n {
        for j in (1..=k).rev() {
            row[j] = (j as u128).saturating_mul(row[j]).saturating_add(row[j - 1]);
        }
        row[0] = 0;
    }
    row[k]
}

/// Exact k-means by enumerating every partition into exactly `k` nonempty
/// clusters (restricted-growth labelings, lexicographic order).
///
/// The first labeling achieving the minimum is returned.
pub fn bruteforce_kmeans(data: &DenseMatrix, k: usize) -> Result<KmeansResult> {
    validate_k(data, k)?;
    let n = data.rows();
    let count = stirling2(n, k);
    if count > MAX_BRUTEFORCE_LABELINGS {
        return Err(Error::SizeGuard {
            size: n,
            limit: max_bruteforce_points(k),
        });
    }
    let mut labels = vec![0usize; n];
    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut visited = 0usize;
    enumerate_labelings(data, k, 1, 1, &mut labels, &mut best, &mut visited);
    let (_, labels) = best.expect("k <= n admits a labeling");
    let clustering = Clustering { labels, k };
    let objective = kmeans_objective(data, &clustering)?;
    Ok(KmeansResult {
        clustering,
        objective,
        iterations: visited,
        replicate_index: 0,
    })
}

/// Largest `n` the exhaustive oracle accepts for `k` clusters.
pub fn max_bruteforce_points(k: usize) -> usize {
    (k..).take_while(|&n| stirling2(n, k) <= MAX_BRUTEFORCE_LABELINGS).last().unwrap_or(k)
}

fn enumerate_labelings(
    data: &DenseMatrix,
    k: usize,
    pos: usize,
    used: usize,
    labels: &mut [usize],
    best: &mut Option<(f64, Vec<usize>)>,
    visited: &mut usize,
) {
    let n = labels.len();
    if pos == n {
        if used == k {
            *visited += 1;
            let (centres, _) = centroids(data, labels, k);
            let cost = centroid_cost(data, labels, &centres);
            if best.as_ref().is_none_or(|(b, _)| cost < *b) {
                *best = Some((cost, labels.to_vec()));
            }
        }
        return;
    }
    // Remaining slots must still be able to open the unused clusters.
    if k - used > n - pos {
        return;
    }
    for l in 0..(used + 1).min(k) {
        labels[pos] = l;
        let used_next = if l == used { used + 1 } else { used };
        enumerate_labelings(data, k, pos + 1, used_next, labels, best, visited);
    }
}

/// A k-means solver viewed as a γ-approximation: its objective is at most
/// γ times the optimum (with some failure probability).
pub trait KmeansApproximation {
    fn solve(&self, data: &DenseMatrix, k: usize) -> Result<KmeansResult>;

    /// Guaranteed approximation factor, when one is known.
    fn gamma(&self) -> Option<f64>;

    fn name(&self) -> &'static str;
}

/// Exhaustive search: γ = 1.
#[derive(Debug, Clone, Copy, Default)]
pub struct ExhaustiveKmeans;

impl KmeansApproximation for ExhaustiveKmeans {
    fn solve(&self, data: &DenseMatrix, k: usize) -> Result<KmeansResult> {
        bruteforce_kmeans(data, k)
    }

    fn gamma(&self) -> Option<f64> {
        Some(1.0)
    }

    fn name(&self) -> &'static str {
        "exhaustive"
    }
}

/// Lloyd's heuristic: no approximation guarantee.
#[derive(Debug, Clone, Copy)]
pub struct LloydKmeans {
    pub options: LloydOptions,
    pub seed: u64,
}

impl KmeansApproximation for LloydKmeans {
    fn solve(&self, data: &DenseMatrix, k: usize) -> Result<KmeansResult> {
        lloyd_kmeans_with(data, k, &self.options, self.seed)
    }

    fn gamma(&self) -> Option<f64> {
        None
    }

    fn name(&self) -> &'static str {
        "lloyd"
    }
}

fn entropy(counts: impl Iterator<Item = usize>, n: f64) -> f64 {
    counts
        .filter(|&c| c > 0)
        .map(|c| {
            let p = c as f64 / n;
            -p * p.ln()
        })
        .sum()
}

/// Normalized mutual information `I(A;B) / ((H(A) + H(B)) / 2)` with
/// maximum-likelihood probabilities and natural logarithms.
///
/// Two single-cluster labelings score 1; exactly one single-cluster labeling
/// scores 0.
pub fn nmi(a: &Clustering, b: &Clustering) -> Result<f64> {
    nmi_labels(a.labels(), b.labels())
}

pub fn nmi_labels(a: &[usize], b: &[usize]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::Shape(format!(
            "clusterings cover {} and {} items",
            a.len(),
            b.len()
        )));
    }
    if a.is_empty() {
        return Err(Error::Parameter("NMI needs at least one item".into()));
    }
    let n = a.len() as f64;
    let mut joint: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut ca: BTreeMap<usize, usize> = BTreeMap::new();
    let mut cb: BTreeMap<usize, usize> = BTreeMap::new();
    for (&x, &y) in a.iter().zip(b) {
        *joint.entry((x, y)).or_default() += 1;
        *ca.entry(x).or_default() += 1;
        *cb.entry(y).or_default() += 1;
    }
    let ha = entropy(ca.values().copied(), n);
    let hb = entropy(cb.values().copied(), n);
    match (ha == 0.0, hb == 0.0) {
        (true, true) => return Ok(1.0),
        (true, false) | (false, true) => return Ok(0.0),
        _ => {}
    }
    let mi: f64 = joint
        .iter()
        .map(|(&(x, y), &c)| {
            let pxy = c as f64 / n;
            pxy * (n * c as f64 / (ca[&x] as f64 * cb[&y] as f64)).ln()
        })
        .sum();
    Ok((mi / (0.5 * (ha + hb))).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn col(values: &[f64]) -> DenseMatrix {
        DenseMatrix::from_columns(&[values]).unwrap()
    }

    #[test]
    fn indicator_examples() {
        let x = indicator_from_labels(&Clustering::new(vec![0, 1], 2).unwrap()).unwrap().x;
        assert_eq!(x, DenseMatrix::identity(2));

        let x = indicator_from_labels(&Clustering::new(vec![0, 0], 1).unwrap()).unwrap().x;
        let h = 0.5f64.sqrt();
        assert!(x.as_slice().iter().all(|v| (v - h).abs() < 1e-15));

        let x = indicator_from_labels(&Clustering::new(vec![0, 0, 1, 1], 2).unwrap()).unwrap().x;
        let want = [h, 0.0, h, 0.0, 0.0, h, 0.0, h];
        assert!(x.as_slice().iter().zip(want).all(|(v, w)| (v - w).abs() < 1e-15));
        let xtx = x.t_matmul(&x).unwrap();
        assert!(xtx.sub(&DenseMatrix::identity(2)).unwrap().max_abs() <= 1e-12);

        assert!(matches!(
            indicator_from_labels(&Clustering::new(vec![0, 0], 2).unwrap()),
            Err(Error::DegenerateClustering(_))
        ));
        assert!(Clustering::new(vec![0, 3], 2).is_err());
    }

    #[test]
    fn objective_examples() {
        let data = DenseMatrix::from_rows(&[[1.0, 2.0], [3.0, -1.0], [0.5, 0.5]]).unwrap();
        let own = Clustering::new(vec![0, 1, 2], 3).unwrap();
        assert_eq!(kmeans_objective(&data, &own).unwrap(), 0.0);

        let same = col(&[4.0, 4.0]);
        assert_eq!(kmeans_objective(&same, &Clustering::new(vec![0, 0], 1).unwrap()).unwrap(), 0.0);

        let line = col(&[0.0, 2.0]);
        let one = Clustering::new(vec![0, 0], 1).unwrap();
        assert_eq!(kmeans_objective(&line, &one).unwrap(), 2.0);
        assert!((kmeans_objective_indicator(&line, &one).unwrap() - 2.0).abs() < 1e-15);

        let empty = Clustering::new(vec![0, 0], 2).unwrap();
        assert!(kmeans_objective(&line, &empty).is_err());
    }

    #[test]
    fn lloyd_examples() {
        let data = col(&[0.0, 0.0, 10.0, 10.0]);
        let r = lloyd_kmeans(&data, 2, 10, 100, 1).unwrap();
        assert_eq!(r.objective, 0.0);
        let l = r.clustering.labels();
        assert!(l[0] == l[1] && l[2] == l[3] && l[0] != l[2]);

        let data = DenseMatrix::from_rows(&[[0.0, 1.0], [2.0, 3.0], [5.0, -1.0]]).unwrap();
        assert_eq!(lloyd_kmeans(&data, 3, 3, 100, 9).unwrap().objective, 0.0);

        let blobs = col(&[0.0, 0.3, -0.2, 8.0, 8.4, 7.9]);
        let lloyd = lloyd_kmeans(&blobs, 2, 10, 100, 4).unwrap();
        let exact = bruteforce_kmeans(&blobs, 2).unwrap();
        assert!((lloyd.objective - exact.objective).abs() < 1e-12);

        assert!(matches!(lloyd_kmeans(&blobs, 7, 1, 10, 0), Err(Error::Parameter(_))));
    }

    #[test]
    fn lloyd_repairs_empty_clusters() {
        // Five coincident points and one outlier; duplicate seeds force repairs.
        let data = col(&[1.0, 1.0, 1.0, 1.0, 1.0, 9.0]);
        for seed in 0..20 {
            let r = lloyd_kmeans(&data, 3, 1, 100, seed).unwrap();
            assert!(r.clustering.sizes().iter().all(|&s| s > 0));
        }
    }

    #[test]
    fn lloyd_is_deterministic() {
        let data = DenseMatrix::from_fn(30, 2, |i, j| ((i * 7 + j * 3) % 11) as f64);
        let a = lloyd_kmeans(&data, 3, 10, 100, 77).unwrap();
        let b = lloyd_kmeans(&data, 3, 10, 100, 77).unwrap();
        assert_eq!(a, b);
        let seeded = LloydOptions { seeding: Seeding::DSquared, ..Default::default() };
        assert!(lloyd_kmeans_with(&data, 3, &seeded, 5).is_ok());
    }

    #[test]
    fn bruteforce_examples() {
        let data = col(&[0.0, 1.0, 5.0]);
        let r = bruteforce_kmeans(&data, 1).unwrap();
        // Variance (mean 2): 4 + 1 + 9.
        assert_eq!(r.objective, 14.0);

        let data = col(&[3.0, 3.0, -3.0, -3.0]);
        let r = bruteforce_kmeans(&data, 2).unwrap();
        assert_eq!(r.objective, 0.0);
        assert_eq!(r.clustering.labels(), &[0, 0, 1, 1]);
    }

    #[test]
    fn bruteforce_guard() {
        assert_eq!(max_bruteforce_points(2), 14);
        assert_eq!(max_bruteforce_points(3), 10);
        let big = DenseMatrix::zeros(15, 1);
        assert!(matches!(bruteforce_kmeans(&big, 2), Err(Error::SizeGuard { size: 15, limit: 14 })));
        let ok = DenseMatrix::from_fn(14, 1, |i, _| i as f64);
        assert!(bruteforce_kmeans(&ok, 2).is_ok());
        assert_eq!(stirling2(10, 3), 9330);
        assert_eq!(stirling2(14, 2), 8191);
    }

    #[test]
    fn bruteforce_dominates_lloyd_on_small_random_data() {
        let mut rng = RngStream::new(2024);
        let data = DenseMatrix::from_fn(8, 2, |_, _| rng.gaussian());
        let oracle = bruteforce_kmeans(&data, 2).unwrap().objective;
        for seed in 0..50 {
            let r = lloyd_kmeans(&data, 2, 1, 100, seed).unwrap();
            assert!(oracle <= r.objective + 1e-12);
        }
    }

    #[test]
    fn nmi_examples() {
        let a = Clustering::new(vec![0, 0, 1, 1, 2], 3).unwrap();
        assert!((nmi(&a, &a).unwrap() - 1.0).abs() < 1e-15);

        let x = Clustering::new(vec![0, 0, 1, 1], 2).unwrap();
        let y = Clustering::new(vec![0, 1, 0, 1], 2).unwrap();
        assert!(nmi(&x, &y).unwrap().abs() < 1e-15);

        let perm = Clustering::new(vec![2, 2, 0, 0, 1], 3).unwrap();
        assert!((nmi(&a, &perm).unwrap() - 1.0).abs() < 1e-15);

        // Hand value: a = (0,0,1,1), b = (0,0,0,1).
        // I = ½ln(4/3) + ¼ln(2/3) + ¼ln2; H(a) = ln2; H(b) = ln4 - ¾ln3.
        let b = Clustering::new(vec![0, 0, 0, 1], 2).unwrap();
        let ln2 = 2f64.ln();
        let ln3 = 3f64.ln();
        let i = 0.5 * (4.0f64 / 3.0).ln() + 0.25 * (2.0f64 / 3.0).ln() + 0.25 * ln2;
        let want = i / (0.5 * (ln2 + 2.0 * ln2 - 0.75 * ln3));
        assert!((nmi(&x, &b).unwrap() - want).abs() < 1e-14);
    }

    #[test]
    fn nmi_degenerate_and_errors() {
        let one = Clustering::new(vec![0, 0, 0], 1).unwrap();
        let two = Clustering::new(vec![0, 1, 1], 2).unwrap();
        assert_eq!(nmi(&one, &one).unwrap(), 1.0);
        assert_eq!(nmi(&one, &two).unwrap(), 0.0);
        assert_eq!(nmi(&two, &one).unwrap(), 0.0);
        assert!(nmi_labels(&[0, 1], &[0]).is_err());
        assert!(nmi_labels(&[], &[]).is_err());
    }

    fn labelled_data() -> impl Strategy<Value = (DenseMatrix, Vec<usize>, usize)> {
        (2usize..20, 1usize..4, 1usize..5).prop_flat_map(|(n, d, k)| {
            let k = k.min(n);
            (
                proptest::collection::vec(-10.0f64..10.0, n * d),
                proptest::collection::vec(0..k, n),
            )
                .prop_map(move |(vals, mut labels)| {
                    // Make every cluster nonempty.
                    for (j, l) in labels.iter_mut().take(k).enumerate() {
                        *l = j;
                    }
                    (DenseMatrix::new(n, d, vals).unwrap(), labels, k)
                })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(128))]

        #[test]
        fn objective_routes_agree((data, labels, k) in labelled_data()) {
            let c = Clustering::new(labels, k).unwrap();
            let a = kmeans_objective(&data, &c).unwrap();
            let b = kmeans_objective_indicator(&data, &c).unwrap();
            prop_assert!((a - b).abs() <= 1e-9 * a.max(1.0), "{a} vs {b}");
            let x = indicator_from_labels(&c).unwrap().x;
            let err = x.t_matmul(&x).unwrap().sub(&DenseMatrix::identity(k)).unwrap().max_abs();
            prop_assert!(err <= 1e-12);
        }

        #[test]
        fn lloyd_history_nonincreasing((data, _, k) in labelled_data(), seed in 0u64..1000) {
            let mut rng = RngStream::new(seed);
            let trace = lloyd_trace(&data, k, 100, Seeding::Uniform, &mut rng).unwrap();
            for w in trace.history.windows(2) {
                prop_assert!(w[1] <= w[0] * (1.0 + 1e-12) + 1e-12, "{:?}", trace.history);
            }
            prop_assert!(trace.result.clustering.sizes().iter().all(|&s| s > 0));
        }

        #[test]
        fn nmi_symmetric_and_permutation_invariant(
            a in proptest::collection::vec(0usize..4, 1..30),
            seed in 0u64..1000,
        ) {
            let mut rng = RngStream::new(seed);
            let b: Vec<usize> = a.iter().map(|_| rng.below(3)).collect();
            let perm = [2usize, 0, 3, 1];
            let a_perm: Vec<usize> = a.iter().map(|&l| perm[l]).collect();
            let ab = nmi_labels(&a, &b).unwrap();
            prop_assert!((ab - nmi_labels(&b, &a).unwrap()).abs() <= 1e-12);
            prop_assert!((ab - nmi_labels(&a_perm, &b).unwrap()).abs() <= 1e-12);
            prop_assert!((0.0..=1.0).contains(&ab));
        }
    }
}

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure the library can report.
///
/// Each variant carries enough context to act on without a backtrace; the CLI
/// maps them onto stable error codes via [`Error::code`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {residual:e})")]
    Convergence { sweeps: usize, residual: f64 },

    #[error("column {column} is numerically dependent on the previous columns (pivot norm {pivot:e})")]
    RankDeficient { column: usize, pivot: f64 },

    #[error("degenerate rank: {0}")]
    DegenerateRank(String),

    #[error("point {index} has a zero self-tuning bandwidth (duplicate points)")]
    Bandwidth { index: usize },

    #[error("size error: {0}")]
    Size(String),

    #[error("vertex {index} has zero degree; normalization is undefined")]
    IsolatedVertex { index: usize },

    #[error("invalid similarity matrix: {0}")]
    InvalidGraph(String),

    #[error("invalid bipartition: {0}")]
    DegeneratePartition(String),

    #[error("input of size {size} exceeds the exhaustive-search limit of {limit}")]
    SizeGuard { size: usize, limit: usize },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("eigen-gap too small (gamma_k = {gamma}); try a larger k whose gap is strictly above 1")]
    Gap { gamma: f64 },

    #[error("top-{k} eigenvalues of the normalized adjacency differ in algebraic and magnitude order; bound checks do not apply")]
    OrderMismatch { k: usize },

    #[error("power iterate lost rank at multiplication {step}: {source}; try a k with a larger gap or a different seed")]
    RankCollapse {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("degenerate clustering: {0}")]
    DegenerateClustering(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl Error {
    /// Short machine-readable identifier for the error kind.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Shape(_) => "shape",
            Error::NonFinite { .. } => "non-finite",
            Error::Convergence { .. } => "convergence",
            Error::RankDeficient { .. } => "rank",
            Error::DegenerateRank(_) => "degenerate-rank",
            Error::Bandwidth { .. } => "bandwidth",
            Error::Size(_) => "size",
            Error::IsolatedVertex { .. } => "isolated-vertex",
            Error::InvalidGraph(_) => "invalid-graph",
            Error::DegeneratePartition(_) => "degenerate-partition",
            Error::SizeGuard { .. } => "size-guard",
            Error::Parameter(_) => "parameter",
            Error::Gap { .. } => "gap",
            Error::OrderMismatch { .. } => "order-mismatch",
            Error::RankCollapse { .. } => "rank-collapse",
            Error::DegenerateClustering(_) => "degenerate-clustering",
            Error::Domain(_) => "domain",
            Error::Parse { .. } => "parse",
        }
    }
}

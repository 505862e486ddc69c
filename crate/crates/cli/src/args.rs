use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "specpow", version, about = "Spectral clustering with power-method embeddings")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the full pipeline once and report one experiment row.
    Cluster(ClusterArgs),
    /// Run power mode for every p in 0..=p-max.
    SweepP(SweepArgs),
    /// Repeat the projection (and optionally k-means) bound checks over seeds.
    BoundCheck(BoundArgs),
    /// Tabulate the iteration-count curve f(x).
    FxPlot(FxArgs),
    /// NMI between two label files.
    Nmi(NmiArgs),
    /// Write a synthetic dataset (or SBM similarity matrix).
    Gen(GenArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Exact,
    Power,
}

#[derive(Debug, Clone, Args)]
pub struct SourceArgs {
    /// Points file: dataset CSV (`.csv`) or libSVM text (anything else).
    #[arg(long, required_unless_present_any = ["dataset_w", "gen"], conflicts_with_all = ["dataset_w", "gen"])]
    pub dataset: Option<PathBuf>,

    /// Explicit similarity matrix as square CSV.
    #[arg(long = "dataset-w", conflicts_with = "gen")]
    pub dataset_w: Option<PathBuf>,

    /// Generator spec: `rings:N,R_IN,R_OUT,NOISE`, `blobs:K,N,D,SEP` or
    /// `sbm:S1+S2+...,P_IN,P_OUT[,JITTER]`.
    #[arg(long)]
    pub gen: Option<String>,

    /// Ground-truth labels for `--dataset-w` input.
    #[arg(long)]
    pub truth: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct GraphArgs {
    /// Fixed heat-kernel bandwidth. Self-tuning is used when omitted.
    #[arg(long)]
    pub sigma: Option<f64>,

    /// Neighbour rank for self-tuning bandwidths.
    #[arg(long = "self-tuning-l", default_value_t = 7)]
    pub self_tuning_l: usize,
}

#[derive(Debug, Clone, Args)]
pub struct KmeansArgs {
    #[arg(long, default_value_t = 10)]
    pub replicates: usize,

    #[arg(long = "max-iter", default_value_t = 100)]
    pub max_iter: usize,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Report zero wall times so identical runs give identical bytes.
    #[arg(long = "no-timing")]
    pub no_timing: bool,
}

#[derive(Debug, Clone, Args)]
pub struct ClusterArgs {
    #[command(flatten)]
    pub source: SourceArgs,

    #[arg(long)]
    pub k: usize,

    #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
    pub mode: ModeArg,

    /// Power iterations (power mode).
    #[arg(long, conflicts_with = "auto_p")]
    pub p: Option<usize>,

    /// Choose p from the measured eigen-gap, epsilon and delta (power mode).
    #[arg(long = "auto-p")]
    pub auto_p: bool,

    #[arg(long)]
    pub epsilon: Option<f64>,

    #[arg(long)]
    pub delta: Option<f64>,

    #[command(flatten)]
    pub graph: GraphArgs,

    #[command(flatten)]
    pub kmeans: KmeansArgs,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Also compute the exact embedding to report gamma_k and proj_dist.
    #[arg(long = "compare-exact")]
    pub compare_exact: bool,

    /// Write the cluster labels, one per line.
    #[arg(long = "labels-out")]
    pub labels_out: Option<PathBuf>,

    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub source: SourceArgs,

    #[arg(long)]
    pub k: usize,

    #[arg(long = "p-max", default_value_t = 10)]
    pub p_max: usize,

    #[command(flatten)]
    pub graph: GraphArgs,

    #[command(flatten)]
    pub kmeans: KmeansArgs,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Also compute the exact embedding to report gamma_k and proj_dist.
    #[arg(long = "compare-exact")]
    pub compare_exact: bool,

    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct BoundArgs {
    #[command(flatten)]
    pub source: SourceArgs,

    #[arg(long)]
    pub k: usize,

    #[arg(long, default_value_t = 0.05)]
    pub epsilon: f64,

    #[arg(long, default_value_t = 0.1)]
    pub delta: f64,

    #[arg(long, default_value_t = 20)]
    pub trials: usize,

    /// Override the required iteration count.
    #[arg(long)]
    pub p: Option<usize>,

    /// Also run the k-means comparison in every trial.
    #[arg(long)]
    pub kmeans: bool,

    #[command(flatten)]
    pub graph: GraphArgs,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Output file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct FxArgs {
    #[arg(long = "x-min", default_value_t = 0.0)]
    pub x_min: f64,

    #[arg(long = "x-max", default_value_t = 0.45)]
    pub x_max: f64,

    /// Number of intervals; `steps + 1` rows are written.
    #[arg(long, default_value_t = 45)]
    pub steps: usize,

    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct NmiArgs {
    pub a: PathBuf,
    pub b: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct GenArgs {
    /// Generator spec, as for `--gen` elsewhere.
    #[arg(long)]
    pub gen: String,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Dataset CSV for point generators, square matrix CSV for `sbm`.
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Ground-truth labels, one per line.
    #[arg(long = "labels-out")]
    pub labels_out: Option<PathBuf>,
}

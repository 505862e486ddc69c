//! Experiment rows and their CSV/JSON encodings.
//!
//! CSV files start with a `# <schema>` comment naming the format version,
//! then a header line. JSON output is an object with the same schema string
//! and a `rows` array using the CSV column names as keys.

use std::fmt::Write as _;

use serde::Serialize;

use crate::args::Format;
use crate::error::CliResult;

pub const EXPERIMENT_SCHEMA: &str = "specpow-experiment v1";
pub const BOUNDS_SCHEMA: &str = "specpow-bounds v1";

pub const EXPERIMENT_COLUMNS: [&str; 11] = [
    "dataset",
    "mode",
    "p",
    "embed_seconds",
    "kmeans_seconds",
    "normalized_time",
    "nmi",
    "objective",
    "gamma_k",
    "proj_dist",
    "k",
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentRow {
    pub dataset: String,
    pub mode: String,
    pub p: Option<usize>,
    pub embed_seconds: f64,
    pub kmeans_seconds: f64,
    /// Embedding time over the p = 0 time (sweeps only).
    pub normalized_time: Option<f64>,
    pub nmi: Option<f64>,
    /// k-means objective on the rows of the embedding that was clustered.
    pub objective: f64,
    pub gamma_k: Option<f64>,
    pub proj_dist: Option<f64>,
    pub k: usize,
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

impl ExperimentRow {
    fn csv_line(&self) -> String {
        [
            csv_field(&self.dataset),
            self.mode.clone(),
            opt(self.p),
            self.embed_seconds.to_string(),
            self.kmeans_seconds.to_string(),
            opt(self.normalized_time),
            opt(self.nmi),
            self.objective.to_string(),
            opt(self.gamma_k),
            opt(self.proj_dist),
            self.k.to_string(),
        ]
        .join(",")
    }
}

#[derive(Serialize)]
struct ExperimentDoc<'a> {
    schema: &'static str,
    rows: &'a [ExperimentRow],
}

pub fn render_experiments(rows: &[ExperimentRow], format: Format) -> CliResult<String> {
    match format {
        Format::Csv => {
            let mut out = format!("# {EXPERIMENT_SCHEMA}\n{}\n", EXPERIMENT_COLUMNS.join(","));
            for row in rows {
                writeln!(out, "{}", row.csv_line()).unwrap();
            }
            Ok(out)
        }
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&ExperimentDoc {
                schema: EXPERIMENT_SCHEMA,
                rows,
            })?;
            s.push('\n');
            Ok(s)
        }
    }
}

pub fn render_fx(points: &[(f64, f64)]) -> String {
    let mut out = String::from("x,f_x\n");
    for (x, f) in points {
        writeln!(out, "{x},{f}").unwrap();
    }
    out
}

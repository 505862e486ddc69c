use std::path::Path;
use std::str::FromStr;

use specpow_core::dataio::{
    block_labels, gen_blobs, gen_sbm, gen_two_rings, parse_libsvm, read_dataset_csv, read_labels, read_matrix_csv,
    Dataset,
};
use specpow_core::graph::{build_graph, build_similarity, SigmaMode, SimilarityGraph};
use specpow_core::DenseMatrix;

use crate::args::{GraphArgs, SourceArgs};
use crate::error::{CliError, CliResult};

/// Parsed `--gen` value.
#[derive(Debug, Clone, PartialEq)]
pub enum GenSpec {
    Rings {
        n_per_ring: usize,
        r_inner: f64,
        r_outer: f64,
        noise_sd: f64,
    },
    Blobs {
        k: usize,
        n_per_blob: usize,
        d: usize,
        separation: f64,
    },
    Sbm {
        sizes: Vec<usize>,
        p_in: f64,
        p_out: f64,
        jitter: Option<f64>,
    },
}

fn field<T: FromStr>(spec: &str, name: &str, value: Option<&str>) -> CliResult<T> {
    let raw = value.ok_or_else(|| CliError::Usage(format!("generator `{spec}` is missing {name}")))?;
    raw.trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("generator `{spec}`: {name} = {raw:?} is not valid")))
}

impl FromStr for GenSpec {
    type Err = CliError;

    fn from_str(spec: &str) -> CliResult<Self> {
        let (kind, rest) = spec
            .split_once(':')
            .ok_or_else(|| CliError::Usage(format!("generator `{spec}` should look like `rings:200,1,3,0.1`")))?;
        let mut parts = rest.split(',');
        let mut next = || parts.next();
        let parsed = match kind {
            "rings" => GenSpec::Rings {
                n_per_ring: field(spec, "n_per_ring", next())?,
                r_inner: field(spec, "r_inner", next())?,
                r_outer: field(spec, "r_outer", next())?,
                noise_sd: field(spec, "noise_sd", next())?,
            },
            "blobs" => GenSpec::Blobs {
                k: field(spec, "k", next())?,
                n_per_blob: field(spec, "n_per_blob", next())?,
                d: field(spec, "d", next())?,
                separation: field(spec, "separation", next())?,
            },
            "sbm" => {
                let sizes = next()
                    .ok_or_else(|| CliError::Usage(format!("generator `{spec}` is missing block sizes")))?
                    .split('+')
                    .map(|s| field(spec, "block size", Some(s)))
                    .collect::<CliResult<Vec<usize>>>()?;
                let p_in = field(spec, "p_in", next())?;
                let p_out = field(spec, "p_out", next())?;
                let jitter = next().map(|j| field(spec, "jitter", Some(j))).transpose()?;
                GenSpec::Sbm {
                    sizes,
                    p_in,
                    p_out,
                    jitter,
                }
            }
            other => {
                return Err(CliError::Usage(format!(
                    "unknown generator `{other}`; expected rings, blobs or sbm"
                )))
            }
        };
        if parts.next().is_some() {
            return Err(CliError::Usage(format!("generator `{spec}` has too many fields")));
        }
        Ok(parsed)
    }
}

/// What a generator produced: points or an explicit similarity matrix.
pub enum Generated {
    Points(Dataset),
    Similarity { w: DenseMatrix, labels: Vec<usize> },
}

impl GenSpec {
    pub fn name(&self) -> &'static str {
        match self {
            GenSpec::Rings { .. } => "two-rings",
            GenSpec::Blobs { .. } => "blobs",
            GenSpec::Sbm { .. } => "sbm",
        }
    }

    pub fn generate(&self, seed: u64) -> CliResult<Generated> {
        Ok(match self {
            GenSpec::Rings {
                n_per_ring,
                r_inner,
                r_outer,
                noise_sd,
            } => Generated::Points(gen_two_rings(*n_per_ring, *r_inner, *r_outer, *noise_sd, seed)?),
            GenSpec::Blobs {
                k,
                n_per_blob,
                d,
                separation,
            } => Generated::Points(gen_blobs(*k, *n_per_blob, *d, *separation, seed)?),
            GenSpec::Sbm {
                sizes,
                p_in,
                p_out,
                jitter,
            } => Generated::Similarity {
                w: gen_sbm(sizes, *p_in, *p_out, *jitter, seed)?,
                labels: block_labels(sizes),
            },
        })
    }
}

/// A validated graph with optional ground truth.
pub struct Input {
    pub name: String,
    pub graph: SimilarityGraph,
    pub truth: Option<Vec<usize>>,
}

pub fn read_text(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn in_file<T>(path: &Path, r: specpow_core::Result<T>) -> CliResult<T> {
    r.map_err(|source| CliError::File {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_label_file(path: &Path) -> CliResult<Vec<usize>> {
    in_file(path, read_labels(&read_text(path)?))
}

fn sigma_mode(graph: &GraphArgs) -> CliResult<SigmaMode> {
    match graph.sigma {
        Some(s) if s > 0.0 && s.is_finite() => Ok(SigmaMode::Fixed(s)),
        Some(s) => Err(CliError::Usage(format!("--sigma must be positive, got {s}"))),
        None => Ok(SigmaMode::SelfTuning(graph.self_tuning_l)),
    }
}

fn points_input(ds: Dataset, graph: &GraphArgs) -> CliResult<Input> {
    let w = build_similarity(&ds.points, sigma_mode(graph)?)?;
    Ok(Input {
        name: ds.name,
        graph: build_graph(w)?,
        truth: Some(ds.labels),
    })
}

fn file_stem(path: &Path) -> String {
    path.file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("dataset")
        .to_string()
}

pub fn load_input(source: &SourceArgs, graph: &GraphArgs, seed: u64) -> CliResult<Input> {
    let mut input = if let Some(path) = &source.dataset {
        let text = read_text(path)?;
        let is_csv = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"));
        let mut ds = if is_csv {
            in_file(path, read_dataset_csv(&text))?
        } else {
            in_file(path, parse_libsvm(&text, None))?.dataset
        };
        if !is_csv {
            ds.name = file_stem(path);
        }
        points_input(ds, graph)?
    } else if let Some(path) = &source.dataset_w {
        let w = in_file(path, read_matrix_csv(&read_text(path)?))?;
        Input {
            name: file_stem(path),
            graph: in_file(path, build_graph(w))?,
            truth: None,
        }
    } else if let Some(spec) = &source.gen {
        let spec: GenSpec = spec.parse()?;
        match spec.generate(seed)? {
            Generated::Points(ds) => points_input(ds, graph)?,
            Generated::Similarity { w, labels } => Input {
                name: spec.name().to_string(),
                graph: build_graph(w)?,
                truth: Some(labels),
            },
        }
    } else {
        return Err(CliError::Usage("one of --dataset, --dataset-w or --gen is required".into()));
    };

    if let Some(path) = &source.truth {
        let labels = read_label_file(path)?;
        if labels.len() != input.graph.n() {
            return Err(CliError::Usage(format!(
                "{} has {} labels for {} points",
                path.display(),
                labels.len(),
                input.graph.n()
            )));
        }
        input.truth = Some(labels);
    }
    Ok(input)
}

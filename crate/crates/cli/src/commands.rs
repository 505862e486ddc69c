use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use specpow_core::clustering::{nmi_labels, LloydOptions, Seeding};
use specpow_core::dataio::{write_dataset_csv, write_labels, write_matrix_csv};
use specpow_core::pipeline::{run_on_graph, EmbeddingMode, PipelineConfig, PipelineRun};
use specpow_core::spectral::{exact_embedding, fx_curve, gamma_k, projection_distance, BoundContext};
use specpow_core::{BoundReport, Embedding, Error};

use crate::args::{BoundArgs, ClusterArgs, Format, FxArgs, GenArgs, KmeansArgs, ModeArg, NmiArgs, SweepArgs};
use crate::error::{CliError, CliResult};
use crate::report::{render_experiments, render_fx, ExperimentRow, BOUNDS_SCHEMA};
use crate::source::{load_input, read_label_file, GenSpec, Generated, Input};

/// Writes `text` to `path`, or to standard output when no path is given.
pub fn emit(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|source| CliError::Io {
            path: p.to_path_buf(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn lloyd_options(args: &KmeansArgs) -> CliResult<LloydOptions> {
    if args.replicates == 0 || args.max_iter == 0 {
        return Err(CliError::Usage("--replicates and --max-iter must be positive".into()));
    }
    Ok(LloydOptions {
        replicates: args.replicates,
        max_iter: args.max_iter,
        seeding: Seeding::Uniform,
    })
}

fn probability(name: &str, v: Option<f64>) -> CliResult<f64> {
    match v {
        Some(x) if x > 0.0 && x < 1.0 => Ok(x),
        Some(x) => Err(CliError::Usage(format!("{name} must lie in (0, 1), got {x}"))),
        None => Err(CliError::Usage(format!("--auto-p requires {name}"))),
    }
}

fn cluster_mode(args: &ClusterArgs) -> CliResult<EmbeddingMode> {
    match args.mode {
        ModeArg::Exact => {
            if args.p.is_some() || args.auto_p {
                return Err(CliError::Usage("--p and --auto-p apply only to --mode power".into()));
            }
            Ok(EmbeddingMode::Exact)
        }
        ModeArg::Power => match (args.p, args.auto_p) {
            (Some(p), false) => Ok(EmbeddingMode::Power { p }),
            (None, true) => Ok(EmbeddingMode::Auto {
                epsilon: probability("--epsilon", args.epsilon)?,
                delta: probability("--delta", args.delta)?,
            }),
            _ => Err(CliError::Usage("--mode power needs either --p or --auto-p".into())),
        },
    }
}

fn nmi_against(truth: Option<&[usize]>, run: &PipelineRun) -> CliResult<Option<f64>> {
    truth
        .map(|t| nmi_labels(run.kmeans.clustering.labels(), t))
        .transpose()
        .map_err(CliError::from)
}

fn row_for(input: &Input, run: &PipelineRun, k: usize, no_timing: bool) -> CliResult<ExperimentRow> {
    let mode = match run.p_used {
        None => "exact",
        Some(_) => "power",
    };
    let (embed, kmeans) = if no_timing {
        (0.0, 0.0)
    } else {
        (run.embed_seconds, run.kmeans_seconds)
    };
    Ok(ExperimentRow {
        dataset: input.name.clone(),
        mode: mode.into(),
        p: run.p_used,
        embed_seconds: embed,
        kmeans_seconds: kmeans,
        normalized_time: None,
        nmi: nmi_against(input.truth.as_deref(), run)?,
        objective: run.kmeans.objective,
        gamma_k: run.gap.as_ref().map(|g| g.gamma_k),
        proj_dist: None,
        k,
    })
}

pub fn cmd_cluster(args: &ClusterArgs) -> CliResult<()> {
    let mode = cluster_mode(args)?;
    let input = load_input(&args.source, &args.graph, args.seed)?;
    let config = PipelineConfig {
        k: args.k,
        mode,
        lloyd: lloyd_options(&args.kmeans)?,
        seed: args.seed,
    };
    let run = run_on_graph(&input.graph, &config)?;
    let mut row = row_for(&input, &run, args.k, args.output.no_timing)?;
    if args.compare_exact {
        if row.gamma_k.is_none() {
            row.gamma_k = Some(gamma_k(&input.graph, args.k)?.gamma_k);
        }
        if run.p_used.is_some() {
            let exact = exact_embedding(&input.graph, args.k)?;
            row.proj_dist = Some(projection_distance(&exact, &run.embedding)?);
        }
    }
    if let Some(path) = &args.labels_out {
        emit(Some(path), &write_labels(run.kmeans.clustering.labels()))?;
    }
    emit(args.output.out.as_deref(), &render_experiments(&[row], args.output.format)?)
}

pub fn cmd_sweep_p(args: &SweepArgs) -> CliResult<()> {
    let input = load_input(&args.source, &args.graph, args.seed)?;
    let lloyd = lloyd_options(&args.kmeans)?;
    let exact: Option<(Embedding, f64)> = if args.compare_exact {
        Some((
            exact_embedding(&input.graph, args.k)?,
            gamma_k(&input.graph, args.k)?.gamma_k,
        ))
    } else {
        None
    };
    let mut rows = Vec::with_capacity(args.p_max + 1);
    let mut base_time = None;
    for p in 0..=args.p_max {
        let config = PipelineConfig {
            k: args.k,
            mode: EmbeddingMode::Power { p },
            lloyd,
            seed: args.seed,
        };
        let run = run_on_graph(&input.graph, &config)?;
        let base = *base_time.get_or_insert(run.embed_seconds);
        let mut row = row_for(&input, &run, args.k, args.output.no_timing)?;
        if !args.output.no_timing && base > 0.0 {
            row.normalized_time = Some(run.embed_seconds / base);
        }
        if let Some((y, gamma)) = &exact {
            row.gamma_k = Some(*gamma);
            row.proj_dist = Some(projection_distance(y, &run.embedding)?);
        }
        rows.push(row);
    }
    emit(args.output.out.as_deref(), &render_experiments(&rows, args.output.format)?)
}

#[derive(Debug, Serialize)]
struct BoundSummary {
    schema: &'static str,
    dataset: String,
    n: usize,
    k: usize,
    epsilon: f64,
    delta: f64,
    gamma_k: f64,
    p_required: usize,
    p_used: usize,
    trials: usize,
    lemma1_passes: usize,
    lemma1_pass_rate: f64,
    /// Trials inside the projection event that also ran the k-means check.
    theorem2_eligible: Option<usize>,
    theorem2_holds: Option<usize>,
    reports: Vec<BoundReport>,
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn render_bounds(s: &BoundSummary, format: Format) -> CliResult<String> {
    if format == Format::Json {
        let mut text = serde_json::to_string_pretty(s)?;
        text.push('\n');
        return Ok(text);
    }
    let mut out = format!("# {BOUNDS_SCHEMA}\n");
    writeln!(
        out,
        "# dataset={} n={} k={} epsilon={} delta={} gamma_k={} p_required={} p_used={} lemma1_passes={}/{}",
        s.dataset, s.n, s.k, s.epsilon, s.delta, s.gamma_k, s.p_required, s.p_used, s.lemma1_passes, s.trials
    )
    .unwrap();
    out.push_str("seed,p_used,proj_dist,lemma1_satisfied,theorem2_lhs,theorem2_rhs,theorem2_satisfied,f_opt\n");
    for r in &s.reports {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.seed,
            r.p_used,
            r.proj_dist,
            r.lemma1_satisfied,
            opt(r.theorem2_lhs),
            opt(r.theorem2_rhs),
            opt(r.theorem2_satisfied),
            opt(r.f_opt)
        )
        .unwrap();
    }
    Ok(out)
}

pub fn cmd_bound_check(args: &BoundArgs) -> CliResult<()> {
    if args.trials == 0 {
        return Err(CliError::Usage("--trials must be positive".into()));
    }
    let input = load_input(&args.source, &args.graph, args.seed)?;
    let ctx = BoundContext::new(&input.graph, args.k, args.epsilon, args.delta)?;
    let reports = ctx.run_trials(args.seed, args.trials, args.kmeans, args.p)?;
    let passes = reports.iter().filter(|r| r.lemma1_satisfied).count();
    let (eligible, holds) = if args.kmeans {
        let inside: Vec<&BoundReport> = reports.iter().filter(|r| r.lemma1_satisfied).collect();
        let holds = inside.iter().filter(|r| r.theorem2_satisfied == Some(true)).count();
        (Some(inside.len()), Some(holds))
    } else {
        (None, None)
    };
    let summary = BoundSummary {
        schema: BOUNDS_SCHEMA,
        dataset: input.name,
        n: input.graph.n(),
        k: args.k,
        epsilon: args.epsilon,
        delta: args.delta,
        gamma_k: ctx.gap().gamma_k,
        p_required: ctx.p_required(),
        p_used: args.p.unwrap_or(ctx.p_required()),
        trials: args.trials,
        lemma1_passes: passes,
        lemma1_pass_rate: passes as f64 / args.trials as f64,
        theorem2_eligible: eligible,
        theorem2_holds: holds,
        reports,
    };
    emit(args.out.as_deref(), &render_bounds(&summary, args.format)?)
}

pub fn cmd_fx_plot(args: &FxArgs) -> CliResult<()> {
    if !(0.0 <= args.x_min && args.x_min < args.x_max && args.x_max < 0.5) {
        return Err(Error::Domain(format!(
            "need 0 <= x-min < x-max < 0.5, got {} and {}",
            args.x_min, args.x_max
        ))
        .into());
    }
    if args.steps == 0 {
        return Err(CliError::Usage("--steps must be at least 1".into()));
    }
    let width = args.x_max - args.x_min;
    let xs: Vec<f64> = (0..=args.steps)
        .map(|i| {
            if i == args.steps {
                args.x_max
            } else {
                args.x_min + width * i as f64 / args.steps as f64
            }
        })
        .collect();
    emit(args.out.as_deref(), &render_fx(&fx_curve(&xs)?))
}

pub fn cmd_nmi(args: &NmiArgs) -> CliResult<f64> {
    let a = read_label_file(&args.a)?;
    let b = read_label_file(&args.b)?;
    if a.len() != b.len() {
        return Err(CliError::Usage(format!(
            "label files differ in length: {} has {}, {} has {}",
            args.a.display(),
            a.len(),
            args.b.display(),
            b.len()
        )));
    }
    let v = nmi_labels(&a, &b)?;
    println!("{v:.4}");
    Ok(v)
}

pub fn cmd_gen(args: &GenArgs) -> CliResult<()> {
    let spec: GenSpec = args.gen.parse()?;
    let (text, labels) = match spec.generate(args.seed)? {
        Generated::Points(ds) => (write_dataset_csv(&ds), ds.labels),
        Generated::Similarity { w, labels } => (write_matrix_csv(&w), labels),
    };
    if let Some(path) = &args.labels_out {
        emit(Some(path), &write_labels(&labels))?;
    }
    emit(args.out.as_deref(), &text)
}

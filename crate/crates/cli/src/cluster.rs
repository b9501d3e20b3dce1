use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;
use log::info;
use neutro_core::assignment::{accuracy, count_kinds, LabelCounts};
use neutro_core::dataset::{load_csv, normalize_with, CsvOptions, Dataset, LabelColumn};
use neutro_core::export;
use neutro_core::fcm::{fcm_fit, FcmResult};
use neutro_core::metrics::matched_accuracy;
use neutro_core::pipeline::cluster;
use neutro_core::solver::{Diagnostics, SolverConfig};
use serde::Serialize;

use crate::config::{fcm_config, Method, SolverArgs};
use crate::manifest::Run;

#[derive(Debug, Args)]
pub struct ClusterArgs {
    /// Input CSV, one point per row
    #[arg(long)]
    pub input: PathBuf,
    /// Column holding class labels: `last`, a 0-based index, or `none`
    #[arg(long, default_value = "none")]
    pub label_column: String,
    /// Skip the first row
    #[arg(long)]
    pub header: bool,
    #[arg(long, default_value_t = ',')]
    pub delimiter: char,
    #[arg(long, value_enum, default_value = "neutro")]
    pub method: Method,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Output directory
    #[arg(long)]
    pub out: PathBuf,
}

pub fn parse_label_column(s: &str) -> Result<Option<LabelColumn>> {
    match s {
        "none" => Ok(None),
        "last" => Ok(Some(LabelColumn::Last)),
        other => other
            .parse()
            .map(|i| Some(LabelColumn::Index(i)))
            .with_context(|| format!("label column must be last, none or an index, got {other:?}")),
    }
}

#[derive(Serialize)]
struct Metrics {
    method: &'static str,
    dataset: String,
    points: usize,
    dim: usize,
    clusters: usize,
    iterations: usize,
    converged: bool,
    final_cost: f64,
    seed: u64,
    restart_costs: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    counts: Option<LabelCounts>,
    #[serde(skip_serializing_if = "Option::is_none")]
    diagnostics: Option<Diagnostics>,
    #[serde(skip_serializing_if = "Option::is_none")]
    accuracy: Option<f64>,
}

pub fn run(args: ClusterArgs) -> Result<()> {
    if !args.delimiter.is_ascii() {
        bail!("delimiter must be a single ASCII character");
    }
    let options = CsvOptions {
        label_column: parse_label_column(&args.label_column)?,
        delimiter: args.delimiter as u8,
        has_header: args.header,
    };
    let data = load_csv(&args.input, &options)?;
    let resolved = args.solver.resolve()?;
    let mut cfg = resolved.solver;
    if !resolved.k_given {
        if let Some(c) = data.num_classes() {
            cfg.num_clusters = c;
        }
    }
    cfg.validate()?;

    let mut run = Run::start(&args.out)?;
    run.input(&args.input);
    if let Some(p) = &args.solver.config {
        run.input(p);
    }
    let metrics = match args.method {
        Method::Neutro => run_neutro(&mut run, &data, &cfg)?,
        Method::Fcm => run_fcm(&mut run, &data, &cfg)?,
    };
    if let Some(a) = metrics.accuracy {
        info!("accuracy {a:.4}");
    }
    run.write_json("metrics.json", &metrics)?;
    run.finish(serde_json::to_value(&cfg)?, Some(cfg.seed))
}

fn run_neutro(run: &mut Run, data: &Dataset, cfg: &SolverConfig) -> Result<Metrics> {
    let res = cluster(data, cfg)?;
    for (r, c) in res.fit.restart_costs.iter().enumerate() {
        info!(
            "restart {r}: seed {}, final cost {c:e}",
            cfg.restart_seed(r)
        );
    }
    export::write_memberships(
        run.create("memberships.csv")?,
        &res.fit.partition,
        &res.fit.indeterminacy,
    )?;
    export::write_centers(run.create("centers.csv")?, res.centers_original().view())?;
    export::write_labels(run.create("labels.csv")?, &res.labels)?;
    export::write_trace(run.create("cost_trace.csv")?, &res.fit.cost_trace)?;
    run.write_json("normalization.json", &res.record)?;
    let accuracy = data
        .labels()
        .map(|truth| accuracy(&res.labels, truth))
        .transpose()?;
    Ok(Metrics {
        method: "neutro",
        dataset: data.name().to_string(),
        points: data.len(),
        dim: data.dim(),
        clusters: cfg.num_clusters,
        iterations: res.fit.iterations,
        converged: res.fit.converged,
        final_cost: res.fit.final_cost(),
        seed: res.fit.seed,
        restart_costs: res.fit.restart_costs.clone(),
        counts: Some(count_kinds(&res.labels)),
        diagnostics: Some(res.fit.diagnostics),
        accuracy,
    })
}

/// Best of `cfg.restarts` FCM runs by final objective, earliest on ties.
pub fn best_fcm(
    points: ndarray::ArrayView2<f64>,
    cfg: &SolverConfig,
) -> Result<(FcmResult, u64, Vec<f64>)> {
    let mut best: Option<(FcmResult, u64)> = None;
    let mut costs = Vec::new();
    for r in 0..cfg.restarts {
        let seed = cfg.restart_seed(r);
        let res = fcm_fit(points, &fcm_config(cfg, seed))?;
        let cost = res.objective_trace.last().copied().unwrap_or(f64::INFINITY);
        info!("restart {r}: seed {seed}, final objective {cost:e}");
        costs.push(cost);
        let better = best
            .as_ref()
            .is_none_or(|(b, _)| cost < b.objective_trace.last().copied().unwrap_or(f64::INFINITY));
        if better {
            best = Some((res, seed));
        }
    }
    let (res, seed) = best.context("restarts must be at least 1")?;
    Ok((res, seed, costs))
}

fn run_fcm(run: &mut Run, data: &Dataset, cfg: &SolverConfig) -> Result<Metrics> {
    let (normalized, record) = normalize_with(data, cfg.scale_mode)?;
    let (res, seed, costs) = best_fcm(normalized.points(), cfg)?;
    let hard = res.hard_labels();
    export::write_fuzzy_memberships(run.create("memberships.csv")?, &res.w)?;
    export::write_centers(
        run.create("centers.csv")?,
        record.restore_matrix(res.centers.view()).view(),
    )?;
    export::write_hard_labels(run.create("labels.csv")?, &hard)?;
    export::write_trace(run.create("cost_trace.csv")?, &res.objective_trace)?;
    run.write_json("normalization.json", &record)?;
    let accuracy = data
        .labels()
        .map(|truth| matched_accuracy(&hard, truth))
        .transpose()?;
    Ok(Metrics {
        method: "fcm",
        dataset: data.name().to_string(),
        points: data.len(),
        dim: data.dim(),
        clusters: cfg.num_clusters,
        iterations: res.iterations,
        converged: res.converged,
        final_cost: res.objective_trace.last().copied().unwrap_or(f64::NAN),
        seed,
        restart_costs: costs,
        counts: None,
        diagnostics: None,
        accuracy,
    })
}

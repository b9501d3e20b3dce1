use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::{Args, ValueEnum};
use neutro_core::export::write_pixel_labels;
use neutro_core::imaging::{
    count_misclassified, f_measure, segment, FMeasure, GrayImage, LabelImage, Mask,
};
use neutro_core::pgm::{read_image, write_image};
use neutro_core::solver::Diagnostics;
use serde::Serialize;

use crate::cluster::best_fcm;
use crate::config::{Method, SolverArgs};
use crate::manifest::Run;

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ImageFormat {
    Pgm,
    Png,
}

impl ImageFormat {
    pub fn ext(self) -> &'static str {
        match self {
            ImageFormat::Pgm => "pgm",
            ImageFormat::Png => "png",
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Polarity {
    Bright,
    Dark,
}

#[derive(Debug, Args)]
pub struct SegmentArgs {
    /// Grayscale PGM (P5) or PNG
    #[arg(long)]
    pub input: PathBuf,
    /// Ground-truth label image; distinct gray levels are distinct classes
    #[arg(long)]
    pub truth: Option<PathBuf>,
    /// Binary foreground mask (gray >= 128 is foreground) for F-measure scoring
    #[arg(long)]
    pub mask: Option<PathBuf>,
    /// Which cluster is foreground when scoring against a mask
    #[arg(long, value_enum, default_value = "bright")]
    pub foreground: Polarity,
    /// Precision weight in the F-measure
    #[arg(long, default_value_t = 0.5)]
    pub psi: f64,
    #[arg(long, value_enum, default_value = "neutro")]
    pub method: Method,
    #[arg(long, value_enum, default_value = "pgm")]
    pub format: ImageFormat,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Output directory
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Serialize)]
struct ClusterStats {
    cluster: usize,
    pixels: usize,
    mean_intensity: f64,
}

#[derive(Serialize)]
struct MembershipStats {
    clusters: Vec<ClusterStats>,
    #[serde(skip_serializing_if = "Option::is_none")]
    mean_max_t: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    mean_f: Option<f64>,
}

#[derive(Serialize)]
struct Metrics {
    method: &'static str,
    width: usize,
    height: usize,
    clusters: usize,
    iterations: usize,
    converged: bool,
    seed: u64,
    restart_costs: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    diagnostics: Option<Diagnostics>,
    #[serde(skip_serializing_if = "Option::is_none")]
    misclassified: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    foreground_cluster: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    f_measure: Option<FMeasure>,
}

fn cluster_stats(img: &GrayImage, labels: &LabelImage, k: usize) -> Vec<ClusterStats> {
    let mut sums = vec![0.0; k];
    let mut counts = vec![0usize; k];
    for (&p, &l) in img.pixels().iter().zip(labels.labels()) {
        sums[l] += p as f64;
        counts[l] += 1;
    }
    (0..k)
        .map(|j| ClusterStats {
            cluster: j,
            pixels: counts[j],
            mean_intensity: if counts[j] == 0 {
                f64::NAN
            } else {
                sums[j] / counts[j] as f64
            },
        })
        .collect()
}

pub fn run(args: SegmentArgs) -> Result<()> {
    let img = read_image(&args.input)?;
    let cfg = args.solver.resolve()?.solver;
    cfg.validate()?;
    let truth = args.truth.as_ref().map(read_image).transpose()?;
    let mask = args.mask.as_ref().map(read_image).transpose()?;
    for other in truth.iter().chain(mask.iter()) {
        if (other.width(), other.height()) != (img.width(), img.height()) {
            bail!(
                "reference image is {}x{}, input is {}x{}",
                other.width(),
                other.height(),
                img.width(),
                img.height()
            );
        }
    }

    let mut run = Run::start(&args.out)?;
    for p in [
        Some(&args.input),
        args.truth.as_ref(),
        args.mask.as_ref(),
        args.solver.config.as_ref(),
    ]
    .into_iter()
    .flatten()
    {
        run.input(p);
    }

    let k = cfg.num_clusters;
    let (labels, mut metrics, mean_max_t, mean_f) = match args.method {
        Method::Neutro => {
            let seg = segment(&img, &cfg)?;
            let n = seg.smoothed_f.len() as f64;
            let max_t: f64 = seg
                .smoothed_t
                .rows()
                .into_iter()
                .map(|r| r.iter().copied().fold(f64::NEG_INFINITY, f64::max))
                .sum();
            let metrics = Metrics {
                method: "neutro",
                width: img.width(),
                height: img.height(),
                clusters: k,
                iterations: seg.fit.iterations,
                converged: seg.fit.converged,
                seed: seg.fit.seed,
                restart_costs: seg.fit.restart_costs.clone(),
                diagnostics: Some(seg.fit.diagnostics),
                misclassified: None,
                foreground_cluster: None,
                f_measure: None,
            };
            (
                seg.labels,
                metrics,
                Some(max_t / n),
                Some(seg.smoothed_f.sum() / n),
            )
        }
        Method::Fcm => {
            let raw = img.to_dataset()?;
            let (normalized, _) = neutro_core::dataset::normalize_with(&raw, cfg.scale_mode)?;
            let (res, seed, costs) = best_fcm(normalized.points(), &cfg)?;
            let labels = LabelImage::new(img.width(), img.height(), res.hard_labels())?;
            let metrics = Metrics {
                method: "fcm",
                width: img.width(),
                height: img.height(),
                clusters: k,
                iterations: res.iterations,
                converged: res.converged,
                seed,
                restart_costs: costs,
                diagnostics: None,
                misclassified: None,
                foreground_cluster: None,
                f_measure: None,
            };
            (labels, metrics, None, None)
        }
    };

    let stats = cluster_stats(&img, &labels, k);
    if let Some(t) = &truth {
        metrics.misclassified = Some(count_misclassified(&labels, &LabelImage::from_gray(t))?);
    }
    if let Some(m) = &mask {
        let populated = stats.iter().filter(|s| s.pixels > 0);
        let pick = match args.foreground {
            Polarity::Bright => {
                populated.max_by(|a, b| a.mean_intensity.total_cmp(&b.mean_intensity))
            }
            Polarity::Dark => {
                populated.min_by(|a, b| a.mean_intensity.total_cmp(&b.mean_intensity))
            }
        };
        if let Some(fg) = pick {
            let predicted = Mask::from_labels(&labels, &[fg.cluster]);
            metrics.foreground_cluster = Some(fg.cluster);
            metrics.f_measure = Some(f_measure(&predicted, &Mask::from_gray(m), args.psi)?);
        }
    }

    let image_name = format!("labels.{}", args.format.ext());
    write_image(&labels.to_gray(), run.path(&image_name))?;
    write_pixel_labels(run.create("labels.csv")?, img.width(), labels.labels())?;
    run.write_json(
        "membership_stats.json",
        &MembershipStats {
            clusters: stats,
            mean_max_t,
            mean_f,
        },
    )?;
    run.write_json("metrics.json", &metrics)?;
    run.finish(serde_json::to_value(&cfg)?, Some(cfg.seed))
}

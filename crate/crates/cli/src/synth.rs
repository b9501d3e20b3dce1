use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, Subcommand};
use neutro_core::dataset::{generate_diamond, DiamondSpec};
use neutro_core::export::{write_pixel_labels, write_points};
use neutro_core::imaging::{
    add_gaussian_noise, synth_quadrant_image, synth_steps_image, GrayImage, LabelImage, StepsSpec,
};
use neutro_core::pgm::write_image;
use serde::Serialize;

use crate::manifest::Run;
use crate::segment::ImageFormat;

#[derive(Debug, Subcommand)]
pub enum SynthKind {
    /// Diamond-motif scatter data with boundary points and outliers
    Diamond(DiamondArgs),
    /// Four-quadrant test image
    Quadrant(QuadrantArgs),
    /// Two stacked rectangles on a bright background
    Steps(StepsArgs),
}

#[derive(Debug, Args)]
pub struct DiamondArgs {
    /// Named layout: x12, x19, x24 or x35
    #[arg(long, conflicts_with_all = ["k", "per_gap"])]
    pub preset: Option<String>,
    /// Clusters in a row, with one outlier above the middle
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    /// Boundary points between adjacent clusters
    #[arg(long, default_value_t = 1)]
    pub per_gap: usize,
    /// Omit the label column
    #[arg(long)]
    pub no_labels: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct NoiseArgs {
    /// Standard deviation of additive Gaussian noise; 0 leaves the image clean
    #[arg(long, default_value_t = 0.0)]
    pub noise_sigma: f64,
    #[arg(long, default_value_t = 0.0)]
    pub noise_mean: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "pgm")]
    pub format: ImageFormat,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct QuadrantArgs {
    #[arg(long, default_value_t = 128)]
    pub side: usize,
    #[command(flatten)]
    pub noise: NoiseArgs,
}

#[derive(Debug, Args)]
pub struct StepsArgs {
    #[arg(long, default_value_t = 128)]
    pub width: usize,
    #[arg(long, default_value_t = 128)]
    pub height: usize,
    #[arg(long, default_value_t = 255)]
    pub background: u8,
    #[arg(long, default_value_t = 20)]
    pub upper: u8,
    #[arg(long, default_value_t = 100)]
    pub lower: u8,
    #[command(flatten)]
    pub noise: NoiseArgs,
}

pub fn run(kind: SynthKind) -> Result<()> {
    match kind {
        SynthKind::Diamond(a) => diamond(a),
        SynthKind::Quadrant(a) => {
            let (img, truth) = synth_quadrant_image(a.side)?;
            let config = serde_json::json!({ "kind": "quadrant", "side": a.side });
            write_image_set(&a.noise, img, truth, config)
        }
        SynthKind::Steps(a) => {
            let spec = StepsSpec {
                width: a.width,
                height: a.height,
                background: a.background,
                upper: a.upper,
                lower: a.lower,
            };
            let (img, truth) = synth_steps_image(&spec)?;
            let mut config = serde_json::to_value(spec)?;
            config["kind"] = "steps".into();
            write_image_set(&a.noise, img, truth, config)
        }
    }
}

fn diamond(a: DiamondArgs) -> Result<()> {
    let spec = match &a.preset {
        Some(name) => {
            DiamondSpec::preset(name).with_context(|| format!("unknown diamond preset {name:?}"))?
        }
        None => {
            let mut spec = DiamondSpec::x12();
            spec.num_clusters = a.k;
            spec.boundary_points_per_gap = a.per_gap;
            let mid = a.k.saturating_sub(1) as f64 * spec.center_spacing / 2.0;
            spec.outliers = vec![[mid, 10.0]];
            spec
        }
    };
    let data = generate_diamond(&spec, !a.no_labels)?;
    let mut run = Run::start(&a.out)?;
    write_points(run.create("diamond.csv")?, data.points(), data.labels())?;
    let roles: Vec<_> = spec.layout_points()?.into_iter().map(|(_, r)| r).collect();
    run.write_json("roles.json", &roles)?;
    run.finish(serde_json::to_value(&spec)?, None)
}

#[derive(Serialize)]
struct NoiseRecord<'a> {
    #[serde(flatten)]
    image: &'a serde_json::Value,
    noise_sigma: f64,
    noise_mean: f64,
}

fn write_image_set(
    noise: &NoiseArgs,
    clean: GrayImage,
    truth: LabelImage,
    config: serde_json::Value,
) -> Result<()> {
    let ext = noise.format.ext();
    let mut run = Run::start(&noise.out)?;
    let img = if noise.noise_sigma > 0.0 || noise.noise_mean != 0.0 {
        add_gaussian_noise(&clean, noise.noise_mean, noise.noise_sigma, noise.seed)?
    } else {
        clean.clone()
    };
    write_image(&img, run.path(&format!("image.{ext}")))?;
    write_image(&clean, run.path(&format!("clean.{ext}")))?;
    write_image(&truth.to_gray(), run.path(&format!("truth.{ext}")))?;
    write_pixel_labels(
        run.create("truth_labels.csv")?,
        truth.width(),
        truth.labels(),
    )?;
    let record = NoiseRecord {
        image: &config,
        noise_sigma: noise.noise_sigma,
        noise_mean: noise.noise_mean,
    };
    run.finish(serde_json::to_value(record)?, Some(noise.seed))
}

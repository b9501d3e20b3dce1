//! `neutro`: synthetic data, clustering, segmentation and self-checks from the command line.

mod cluster;
mod config;
mod manifest;
mod segment;
mod synth;
mod verify;

use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "neutro",
    version,
    about = "Neutrosophic clustering and segmentation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate synthetic datasets and images
    Synth {
        #[command(subcommand)]
        kind: synth::SynthKind,
    },
    /// Cluster a CSV dataset
    Cluster(cluster::ClusterArgs),
    /// Segment a grayscale image
    Segment(segment::SegmentArgs),
    /// Run the gradient, stationarity and constraint checks
    Verify(verify::VerifyArgs),
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var("NEUTRO_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .with_context(|| format!("NEUTRO_THREADS must be a positive integer, got {raw:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .context("configuring thread pool")
}

/// `<kind>: <message>` on one line.
fn reason(err: &anyhow::Error) -> String {
    let kind = err
        .chain()
        .find_map(|e| {
            if let Some(e) = e.downcast_ref::<neutro_core::Error>() {
                Some(e.kind())
            } else if e.is::<std::io::Error>() {
                Some("io")
            } else if e.is::<serde_json::Error>() {
                Some("json")
            } else {
                None
            }
        })
        .unwrap_or("runtime");
    // core errors already embed their source text
    let mut message = String::new();
    for cause in err.chain().map(|e| e.to_string()) {
        if message.contains(&cause) {
            continue;
        }
        if !message.is_empty() {
            message.push_str(": ");
        }
        message.push_str(&cause);
    }
    let message = message.replace(['\n', '\r'], " ");
    format!("{kind}: {message}")
}

fn dispatch(cli: Cli) -> Result<()> {
    configure_threads()?;
    match cli.command {
        Command::Synth { kind } => synth::run(kind),
        Command::Cluster(a) => cluster::run(a),
        Command::Segment(a) => segment::run(a),
        Command::Verify(a) => verify::run(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("invalid arguments");
            eprintln!("error: usage: {}", first.trim_start_matches("error: "));
            return ExitCode::from(2);
        }
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", reason(&e));
            ExitCode::FAILURE
        }
    }
}

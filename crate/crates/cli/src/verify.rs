use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::Args;
use neutro_core::dataset::{generate_diamond, DiamondSpec};
use neutro_core::solver::SolverConfig;
use neutro_core::verify::{run_all, Fault, VerifyOptions};

use crate::manifest::Run;

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Random instances per suite
    #[arg(long, default_value_t = 20)]
    pub instances: usize,
    /// Points per instance
    #[arg(long, default_value_t = 10)]
    pub points: usize,
    /// Clusters per instance
    #[arg(long, default_value_t = 3)]
    pub clusters: usize,
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    #[arg(long, default_value_t = 2.0)]
    pub m: f64,
    /// Also write report.json and a manifest here
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, hide = true)]
    pub inject_fault: Option<Fault>,
}

pub fn run(args: VerifyArgs) -> Result<()> {
    let opts = VerifyOptions {
        seed: args.seed,
        instances: args.instances,
        points: args.points,
        clusters: args.clusters,
        dim: args.dim,
        m: args.m,
        fault: args.inject_fault,
    };
    let datasets = [
        DiamondSpec::x12(),
        DiamondSpec::x19(),
        DiamondSpec::x24(),
        DiamondSpec::x35(),
    ]
    .iter()
    .map(|s| Ok((generate_diamond(s, false)?, s.num_clusters)))
    .collect::<neutro_core::Result<Vec<_>>>()?;
    let report = run_all(&opts, &datasets, &SolverConfig::default())?;
    for c in &report.checks {
        println!(
            "{} {}: max error {:e} (tolerance {:e}, {} instances)",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.max_error,
            c.tolerance,
            c.instances
        );
    }
    if let Some(dir) = &args.out {
        let mut run = Run::start(dir)?;
        run.write_json("report.json", &report)?;
        let config = serde_json::json!({
            "instances": opts.instances,
            "points": opts.points,
            "clusters": opts.clusters,
            "dim": opts.dim,
            "m": opts.m,
        });
        run.finish(config, Some(opts.seed))?;
    }
    if !report.passed() {
        let failed: Vec<&str> = report
            .checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.name.as_str())
            .collect();
        bail!("verification failed: {}", failed.join(", "));
    }
    Ok(())
}

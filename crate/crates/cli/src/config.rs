use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Args, ValueEnum};
use neutro_core::dataset::ScaleMode;
use neutro_core::fcm::FcmConfig;
use neutro_core::solver::{CenterRule, IndeterminacySpace, SolverConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Neutro,
    Fcm,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SpaceArg {
    Raw,
    Normalized,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ScaleArg {
    Diameter,
    SqrtDim,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum RuleArg {
    Determinacy,
    Stationary,
}

/// Solver settings. Precedence: built-in defaults, then `--config`, then these flags.
#[derive(Debug, Args)]
pub struct SolverArgs {
    /// JSON file with any subset of the solver settings
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Number of main clusters
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub m: Option<f64>,
    #[arg(long)]
    pub w1: Option<f64>,
    #[arg(long)]
    pub w2: Option<f64>,
    /// Stop once memberships change by less than this
    #[arg(long)]
    pub eps_conv: Option<f64>,
    /// Neighborhood radius for indeterminacy
    #[arg(long)]
    pub eps_density: Option<f64>,
    /// Neighbor count at which a point counts as dense
    #[arg(long)]
    pub np_th: Option<usize>,
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Boundary threshold
    #[arg(long)]
    pub t: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    #[arg(long)]
    pub restarts: Option<usize>,
    /// Space in which indeterminacy distances are measured
    #[arg(long, value_enum)]
    pub normalize_space: Option<SpaceArg>,
    #[arg(long, value_enum)]
    pub scale: Option<ScaleArg>,
    #[arg(long, value_enum)]
    pub center_rule: Option<RuleArg>,
}

pub struct Resolved {
    pub solver: SolverConfig,
    /// Whether the cluster count came from the config file or a flag.
    pub k_given: bool,
}

fn read_config_file(path: &Path) -> Result<(SolverConfig, bool)> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .with_context(|| format!("parsing config {}", path.display()))?;
    let k_given = value.get("num_clusters").is_some();
    let cfg =
        serde_json::from_value(value).with_context(|| format!("config {}", path.display()))?;
    Ok((cfg, k_given))
}

impl SolverArgs {
    pub fn resolve(&self) -> Result<Resolved> {
        let (mut cfg, mut k_given) = match &self.config {
            Some(p) => read_config_file(p)?,
            None => (SolverConfig::default(), false),
        };
        if let Some(k) = self.k {
            cfg.num_clusters = k;
            k_given = true;
        }
        macro_rules! set {
            ($flag:ident => $field:ident) => {
                if let Some(v) = self.$flag {
                    cfg.$field = v;
                }
            };
        }
        set!(m => m);
        set!(w1 => w1);
        set!(w2 => w2);
        set!(eps_conv => eps_conv);
        set!(eps_density => eps_density);
        set!(np_th => np_threshold);
        set!(alpha => alpha);
        set!(t => boundary_t);
        set!(seed => seed);
        set!(max_iter => max_iter);
        set!(restarts => restarts);
        if let Some(s) = self.normalize_space {
            cfg.indeterminacy_space = match s {
                SpaceArg::Raw => IndeterminacySpace::Raw,
                SpaceArg::Normalized => IndeterminacySpace::Normalized,
            };
        }
        if let Some(s) = self.scale {
            cfg.scale_mode = match s {
                ScaleArg::Diameter => ScaleMode::Diameter,
                ScaleArg::SqrtDim => ScaleMode::SqrtDim,
            };
        }
        if let Some(r) = self.center_rule {
            cfg.center_rule = match r {
                RuleArg::Determinacy => CenterRule::Determinacy,
                RuleArg::Stationary => CenterRule::Stationary,
            };
        }
        Ok(Resolved {
            solver: cfg,
            k_given,
        })
    }
}

pub fn fcm_config(cfg: &SolverConfig, seed: u64) -> FcmConfig {
    FcmConfig {
        num_clusters: cfg.num_clusters,
        m: cfg.m,
        eps_conv: cfg.eps_conv,
        max_iter: cfg.max_iter,
        seed,
        singular_delta: cfg.singular_delta,
    }
}

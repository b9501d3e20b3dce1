//! Self-checks run on demand: finite-difference gradients, stationarity of the updates, and
//! membership constraints along whole fits.

use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use serde::Serialize;

use crate::dataset::{normalize, Dataset};
use crate::error::{Error, Result};
use crate::pipeline::indeterminacy_for;
use crate::solver::{
    fit_observed, implied_multipliers, lagrangian, lagrangian_gradients, update_centers,
    update_memberships, CenterRule, GradientForm, NeutrosophicPartition, SolverConfig,
};

pub const GRADIENT_TOLERANCE: f64 = 1e-5;
pub const FD_STEP: f64 = 1e-6;
pub const STATIONARITY_TOLERANCE: f64 = 1e-8;
pub const CONSTRAINT_TOLERANCE: f64 = 1e-9;

/// Deliberate defects for checking that the suites can fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fault {
    /// Compare finite differences against the partials without chain-rule factors.
    Gradient,
    /// Feed the determinacy-weighted center rule to the center stationarity check.
    Stationarity,
    /// Shift every F by 1e-6 before the constraint check.
    Constraint,
}

impl std::str::FromStr for Fault {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gradient" => Ok(Fault::Gradient),
            "stationarity" => Ok(Fault::Stationarity),
            "constraint" => Ok(Fault::Constraint),
            _ => Err(Error::InvalidConfig(format!("unknown fault {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub instances: usize,
    pub max_error: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl CheckResult {
    fn new(name: &str, instances: usize, max_error: f64, tolerance: f64) -> Self {
        Self {
            name: name.to_string(),
            instances,
            max_error,
            tolerance,
            passed: max_error.is_finite() && max_error < tolerance,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct CheckReport {
    pub checks: Vec<CheckResult>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    pub seed: u64,
    pub instances: usize,
    pub points: usize,
    pub clusters: usize,
    pub dim: usize,
    pub m: f64,
    pub fault: Option<Fault>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            instances: 20,
            points: 10,
            clusters: 3,
            dim: 2,
            m: 2.0,
            fault: None,
        }
    }
}

impl VerifyOptions {
    fn config(&self) -> SolverConfig {
        SolverConfig {
            num_clusters: self.clusters,
            m: self.m,
            ..Default::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.instances == 0 || self.points == 0 || self.dim == 0 {
            return Err(Error::InvalidConfig(
                "instances, points and dim must be positive".into(),
            ));
        }
        self.config().validate()
    }
}

/// Random problem inside a box of diameter below 1, so `k - sum d2` stays positive.
struct Instance {
    points: Array2<f64>,
    indet: Vec<f64>,
    part: NeutrosophicPartition,
    centers: Array2<f64>,
    lambda: Vec<f64>,
}

fn instance(opts: &VerifyOptions, index: usize, alpha: f64) -> Instance {
    let seed = opts
        .seed
        .wrapping_add((index as u64).wrapping_mul(crate::solver::RESTART_SEED_STEP));
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
    let side = 0.95 / (opts.dim as f64).sqrt();
    let (n, k, d) = (opts.points, opts.clusters, opts.dim);
    let points = Array2::from_shape_fn((n, d), |_| side * rng.random::<f64>());
    let centers = Array2::from_shape_fn((k, d), |_| side * rng.random::<f64>());
    let indet = (0..n)
        .map(|_| alpha + (1.0 - 2.0 * alpha) * rng.random::<f64>())
        .collect();
    let mut t = Array2::zeros((n, k));
    let mut f = Array1::zeros(n);
    for i in 0..n {
        let raw: Vec<f64> = (0..=k).map(|_| 0.05 + rng.random::<f64>()).collect();
        let s: f64 = raw.iter().sum();
        for j in 0..k {
            t[[i, j]] = raw[j] / s;
        }
        f[i] = raw[k] / s;
    }
    let lambda = (0..n).map(|_| rng.random::<f64>()).collect();
    Instance {
        points,
        indet,
        part: NeutrosophicPartition { t, f },
        centers,
        lambda,
    }
}

fn central_difference(mut eval: impl FnMut(f64) -> Result<f64>, x: f64) -> Result<f64> {
    Ok((eval(x + FD_STEP)? - eval(x - FD_STEP)?) / (2.0 * FD_STEP))
}

/// Largest norm-wise relative error between analytic and finite-difference partials.
pub fn gradient_check(opts: &VerifyOptions) -> Result<CheckResult> {
    opts.validate()?;
    let cfg = opts.config();
    let form = match opts.fault {
        Some(Fault::Gradient) => GradientForm::Textbook,
        _ => GradientForm::Exact,
    };
    let mut worst: f64 = 0.0;
    for index in 0..opts.instances {
        let inst = instance(opts, index, cfg.alpha);
        let pts = inst.points.view();
        let lagr = |part: &NeutrosophicPartition, centers: &Array2<f64>| {
            lagrangian(pts, &inst.indet, part, centers.view(), &inst.lambda, &cfg)
        };
        let g = lagrangian_gradients(
            pts,
            &inst.indet,
            &inst.part,
            inst.centers.view(),
            &inst.lambda,
            &cfg,
            form,
        )?;
        let mut analytic = Vec::new();
        let mut numeric = Vec::new();
        for ((i, j), &v) in g.d_t.indexed_iter() {
            analytic.push(v);
            numeric.push(central_difference(
                |x| {
                    let mut p = inst.part.clone();
                    p.t[[i, j]] = x;
                    lagr(&p, &inst.centers)
                },
                inst.part.t[[i, j]],
            )?);
        }
        for (i, &v) in g.d_f.indexed_iter() {
            analytic.push(v);
            numeric.push(central_difference(
                |x| {
                    let mut p = inst.part.clone();
                    p.f[i] = x;
                    lagr(&p, &inst.centers)
                },
                inst.part.f[i],
            )?);
        }
        for ((j, q), &v) in g.d_c.indexed_iter() {
            analytic.push(v);
            numeric.push(central_difference(
                |x| {
                    let mut c = inst.centers.clone();
                    c[[j, q]] = x;
                    lagr(&inst.part, &c)
                },
                inst.centers[[j, q]],
            )?);
        }
        let diff: f64 = analytic
            .iter()
            .zip(&numeric)
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            .sqrt();
        let scale = numeric
            .iter()
            .map(|v| v * v)
            .sum::<f64>()
            .sqrt()
            .max(f64::MIN_POSITIVE);
        worst = worst.max(diff / scale);
    }
    Ok(CheckResult::new(
        "gradient",
        opts.instances,
        worst,
        GRADIENT_TOLERANCE,
    ))
}

/// Membership and center updates each zero their own partials. Returns the membership check
/// then the center check.
pub fn stationarity_check(opts: &VerifyOptions) -> Result<[CheckResult; 2]> {
    opts.validate()?;
    let cfg = opts.config();
    let rule = match opts.fault {
        Some(Fault::Stationarity) => CenterRule::Determinacy,
        _ => CenterRule::Stationary,
    };
    let mut worst_membership: f64 = 0.0;
    let mut worst_center: f64 = 0.0;
    for index in 0..opts.instances {
        let inst = instance(opts, index, cfg.alpha);
        let pts = inst.points.view();
        let (part, diag) = update_memberships(pts, &inst.indet, inst.centers.view(), &cfg)?;
        if diag.clamped_bases > 0 || diag.singular_rows > 0 {
            return Err(Error::InvalidInput(format!(
                "verification instance {index} left the regular regime"
            )));
        }
        let lambda = implied_multipliers(pts, &inst.indet, inst.centers.view(), &cfg);
        let g = lagrangian_gradients(
            pts,
            &inst.indet,
            &part,
            inst.centers.view(),
            &lambda,
            &cfg,
            GradientForm::Textbook,
        )?;
        let membership = g
            .d_t
            .iter()
            .chain(g.d_f.iter())
            .fold(0.0, |acc: f64, v| acc.max(v.abs()));
        worst_membership = worst_membership.max(membership);

        let (centers, _) =
            update_centers(pts, &inst.indet, &part, inst.centers.view(), &cfg, rule)?;
        let g = lagrangian_gradients(
            pts,
            &inst.indet,
            &part,
            centers.view(),
            &lambda,
            &cfg,
            GradientForm::Exact,
        )?;
        let center = g.d_c.iter().fold(0.0, |acc: f64, v| acc.max(v.abs()));
        worst_center = worst_center.max(center);
    }
    Ok([
        CheckResult::new(
            "stationarity-memberships",
            opts.instances,
            worst_membership,
            STATIONARITY_TOLERANCE,
        ),
        CheckResult::new(
            "stationarity-centers",
            opts.instances,
            worst_center,
            STATIONARITY_TOLERANCE,
        ),
    ])
}

/// Worst row-sum violation or out-of-range membership over every iteration of a full fit on
/// each `(dataset, k)` pair.
pub fn constraint_check(
    datasets: &[(Dataset, usize)],
    cfg: &SolverConfig,
    fault: Option<Fault>,
) -> Result<CheckResult> {
    let shift = if fault == Some(Fault::Constraint) {
        1e-6
    } else {
        0.0
    };
    let mut worst: f64 = 0.0;
    let mut iterations = 0;
    for (data, k) in datasets {
        let cfg = SolverConfig {
            num_clusters: *k,
            ..cfg.clone()
        };
        let (normalized, _) = normalize(data)?;
        let indet = indeterminacy_for(data, &normalized, &cfg)?;
        fit_observed(normalized.points(), &indet, &cfg, |_, part, _| {
            iterations += 1;
            for (row, &f) in part.t.rows().into_iter().zip(part.f.iter()) {
                let f = f + shift;
                let sum = row.sum() + f;
                worst = worst.max((sum - 1.0).abs());
                for v in row.iter().chain(std::iter::once(&f)) {
                    worst = worst.max(-v).max(v - 1.0);
                }
            }
        })?;
    }
    Ok(CheckResult::new(
        "constraints",
        iterations,
        worst,
        CONSTRAINT_TOLERANCE,
    ))
}

/// All suites; the constraint suite runs on `datasets` with `cfg`.
pub fn run_all(
    opts: &VerifyOptions,
    datasets: &[(Dataset, usize)],
    cfg: &SolverConfig,
) -> Result<CheckReport> {
    let mut checks = vec![gradient_check(opts)?];
    checks.extend(stationarity_check(opts)?);
    checks.push(constraint_check(datasets, cfg, opts.fault)?);
    Ok(CheckReport { checks })
}

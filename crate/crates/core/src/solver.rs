//! Alternating closed-form minimization of the indeterminacy-weighted cost with a noise
//! cluster.

use log::{debug, warn};
use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};
use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{squared_distance, ScaleMode};
use crate::error::{Error, Result};
use crate::indeterminacy::IndeterminacyParams;

/// Golden-ratio increment used to derive per-restart seeds.
pub const RESTART_SEED_STEP: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CenterRule {
    /// Weights `(w1*(1-I)*T)^m`: dense points pull, sparse points barely move centers.
    #[default]
    Determinacy,
    /// Weights `(w1*I*T)^m - (w2*(1-I)*F)^m`, the exact stationary point of the cost in `C`.
    Stationary,
}

/// Coordinate space in which neighbor distances for indeterminacy are measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IndeterminacySpace {
    #[default]
    Raw,
    Normalized,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub num_clusters: usize,
    pub m: f64,
    pub w1: f64,
    pub w2: f64,
    pub eps_conv: f64,
    pub max_iter: usize,
    pub eps_density: f64,
    pub np_threshold: usize,
    pub alpha: f64,
    pub boundary_t: f64,
    pub seed: u64,
    pub singular_delta: f64,
    pub restarts: usize,
    pub center_rule: CenterRule,
    pub indeterminacy_space: IndeterminacySpace,
    pub scale_mode: ScaleMode,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            num_clusters: 2,
            m: 2.0,
            w1: 1.0,
            w2: 2.0,
            eps_conv: 1e-6,
            max_iter: 300,
            eps_density: 4.0,
            np_threshold: 4,
            alpha: 0.05,
            boundary_t: 0.4,
            seed: 0,
            singular_delta: 1e-9,
            restarts: 1,
            center_rule: CenterRule::default(),
            indeterminacy_space: IndeterminacySpace::default(),
            scale_mode: ScaleMode::default(),
        }
    }
}

impl SolverConfig {
    pub fn with_clusters(k: usize) -> Self {
        Self {
            num_clusters: k,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.num_clusters < 2 {
            return bad(format!("k must be at least 2, got {}", self.num_clusters));
        }
        if !(self.m > 1.0 && self.m.is_finite()) {
            return bad(format!("m must exceed 1, got {}", self.m));
        }
        if !(self.w1 > 0.0 && self.w1.is_finite() && self.w2 > 0.0 && self.w2.is_finite()) {
            return bad(format!(
                "w1 and w2 must be positive, got {} and {}",
                self.w1, self.w2
            ));
        }
        if !(self.eps_conv > 0.0) {
            return bad(format!("eps_conv must be positive, got {}", self.eps_conv));
        }
        if self.max_iter == 0 {
            return bad("max_iter must be at least 1".into());
        }
        if !(self.boundary_t > 0.0 && self.boundary_t < 0.5) {
            return bad(format!("t must lie in (0, 0.5), got {}", self.boundary_t));
        }
        if !(self.singular_delta > 0.0) {
            return bad(format!(
                "singular_delta must be positive, got {}",
                self.singular_delta
            ));
        }
        if self.restarts == 0 {
            return bad("restarts must be at least 1".into());
        }
        if !(self.eps_density > 0.0 && self.eps_density.is_finite()) {
            return bad(format!(
                "eps_density must be positive, got {}",
                self.eps_density
            ));
        }
        self.indeterminacy_params().validate()
    }

    pub fn indeterminacy_params(&self) -> IndeterminacyParams {
        IndeterminacyParams {
            num_clusters: self.num_clusters,
            eps: self.eps_density,
            np_threshold: self.np_threshold,
            alpha: self.alpha,
        }
    }

    /// Seed used by restart `r`; restart 0 uses `seed` itself.
    pub fn restart_seed(&self, r: usize) -> u64 {
        self.seed
            .wrapping_add((r as u64).wrapping_mul(RESTART_SEED_STEP))
    }
}

/// Main-cluster memberships `t` (n x k) and noise memberships `f` (n).
#[derive(Debug, Clone, PartialEq)]
pub struct NeutrosophicPartition {
    pub t: Array2<f64>,
    pub f: Array1<f64>,
}

impl NeutrosophicPartition {
    pub fn len(&self) -> usize {
        self.f.len()
    }

    pub fn is_empty(&self) -> bool {
        self.f.is_empty()
    }

    pub fn num_clusters(&self) -> usize {
        self.t.ncols()
    }

    /// Largest `|sum_j T_ij + F_i - 1|` over all rows.
    pub fn max_row_violation(&self) -> f64 {
        self.t
            .rows()
            .into_iter()
            .zip(self.f.iter())
            .map(|(row, &f)| (row.sum() + f - 1.0).abs())
            .fold(0.0, f64::max)
    }

    pub fn check(&self, tol: f64) -> Result<()> {
        if self.t.nrows() != self.f.len() {
            return Err(Error::ShapeMismatch(format!(
                "T has {} rows, F has {} entries",
                self.t.nrows(),
                self.f.len()
            )));
        }
        let out_of_range = self
            .t
            .iter()
            .chain(self.f.iter())
            .any(|&v| !(-tol..=1.0 + tol).contains(&v));
        if out_of_range {
            return Err(Error::InvalidInput("membership outside [0, 1]".into()));
        }
        let worst = self.max_row_violation();
        if worst > tol {
            return Err(Error::InvalidInput(format!(
                "membership rows do not sum to 1 (worst deviation {worst:e})"
            )));
        }
        Ok(())
    }
}

/// Counters for guarded numerical corner cases.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Diagnostics {
    /// Rows whose noise base `k - sum_j d2` was not positive and got clamped.
    pub clamped_bases: usize,
    /// Rows that coincided with a center and were hard-assigned.
    pub singular_rows: usize,
    /// Center updates that kept the previous center because the weight sum vanished.
    pub center_fallbacks: usize,
    /// Final centers outside the data bounding box grown by 10%.
    pub centers_outside_box: usize,
}

impl Diagnostics {
    fn absorb(&mut self, other: Diagnostics) {
        self.clamped_bases += other.clamped_bases;
        self.singular_rows += other.singular_rows;
        self.center_fallbacks += other.center_fallbacks;
        self.centers_outside_box += other.centers_outside_box;
    }
}

#[derive(Debug, Clone)]
pub struct FitResult {
    pub partition: NeutrosophicPartition,
    pub centers: Array2<f64>,
    pub indeterminacy: Vec<f64>,
    pub iterations: usize,
    pub cost_trace: Vec<f64>,
    pub converged: bool,
    pub diagnostics: Diagnostics,
    /// Seed the returned run was initialized with.
    pub seed: u64,
    /// Final cost of every restart, in restart order.
    pub restart_costs: Vec<f64>,
}

impl FitResult {
    pub fn final_cost(&self) -> f64 {
        self.cost_trace.last().copied().unwrap_or(f64::NAN)
    }
}

fn check_shapes(
    points: ArrayView2<f64>,
    indet: &[f64],
    centers: ArrayView2<f64>,
    cfg: &SolverConfig,
) -> Result<()> {
    if indet.len() != points.nrows() {
        return Err(Error::ShapeMismatch(format!(
            "{} indeterminacy values for {} points",
            indet.len(),
            points.nrows()
        )));
    }
    if centers.nrows() != cfg.num_clusters || centers.ncols() != points.ncols() {
        return Err(Error::ShapeMismatch(format!(
            "centers are {}x{}, expected {}x{}",
            centers.nrows(),
            centers.ncols(),
            cfg.num_clusters,
            points.ncols()
        )));
    }
    Ok(())
}

fn check_partition_shape(part: &NeutrosophicPartition, n: usize, k: usize) -> Result<()> {
    if part.t.dim() != (n, k) || part.f.len() != n {
        return Err(Error::ShapeMismatch(format!(
            "partition is {:?} + {}, expected ({n}, {k}) + {n}",
            part.t.dim(),
            part.f.len()
        )));
    }
    Ok(())
}

fn squared_distances(x: ArrayView1<f64>, centers: ArrayView2<f64>) -> Vec<f64> {
    centers
        .rows()
        .into_iter()
        .map(|c| squared_distance(x, c))
        .collect()
}

/// Seeds centers by farthest-point traversal over dense points and draws a random feasible
/// partition. Deterministic in `seed`.
pub fn initialize(
    points: ArrayView2<f64>,
    indet: &[f64],
    cfg: &SolverConfig,
    seed: u64,
) -> Result<(NeutrosophicPartition, Array2<f64>)> {
    cfg.validate()?;
    let n = points.nrows();
    let k = cfg.num_clusters;
    if n < k {
        return Err(Error::NotEnoughPoints {
            points: n,
            clusters: k,
        });
    }
    if indet.len() != n {
        return Err(Error::ShapeMismatch(format!(
            "{} indeterminacy values for {n} points",
            indet.len()
        )));
    }
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);

    let dense: Vec<usize> = (0..n).filter(|&i| indet[i] <= cfg.alpha + 1e-12).collect();
    let candidates: Vec<usize> = if dense.len() >= k {
        dense
    } else {
        (0..n).collect()
    };

    let first = candidates[rng.random_range(0..candidates.len())];
    let mut chosen = vec![first];
    let mut taken = vec![false; candidates.len()];
    let mut nearest: Vec<f64> = candidates
        .iter()
        .map(|&i| squared_distance(points.row(i), points.row(first)))
        .collect();
    if let Some(pos) = candidates.iter().position(|&i| i == first) {
        taken[pos] = true;
    }
    while chosen.len() < k {
        let mut best: Option<usize> = None;
        for (pos, &d) in nearest.iter().enumerate() {
            if taken[pos] {
                continue;
            }
            if best.is_none_or(|b| d > nearest[b]) {
                best = Some(pos);
            }
        }
        let pos = best.expect("candidates outnumber clusters");
        taken[pos] = true;
        let pick = candidates[pos];
        chosen.push(pick);
        for (q, &i) in candidates.iter().enumerate() {
            let d = squared_distance(points.row(i), points.row(pick));
            if d < nearest[q] {
                nearest[q] = d;
            }
        }
    }
    let centers = points.select(Axis(0), &chosen);

    let mut t = Array2::zeros((n, k));
    let mut f = Array1::zeros(n);
    for i in 0..n {
        let raw: Vec<f64> = (0..k).map(|_| rng.random::<f64>()).collect();
        let noise = rng.random::<f64>() * 0.05;
        let total: f64 = raw.iter().sum();
        for j in 0..k {
            let share = if total > 0.0 {
                raw[j] / total
            } else {
                1.0 / k as f64
            };
            t[[i, j]] = share * (1.0 - noise);
        }
        f[i] = noise;
    }
    debug!("initial centers drawn from points {chosen:?}");
    Ok((NeutrosophicPartition { t, f }, centers))
}

/// Cost: `sum_i [ sum_j (w1 I_i T_ij)^m d2_ij + (w2 (1-I_i) F_i)^m (k - sum_j d2_ij) ]`.
pub fn compute_cost(
    points: ArrayView2<f64>,
    indet: &[f64],
    part: &NeutrosophicPartition,
    centers: ArrayView2<f64>,
    cfg: &SolverConfig,
) -> Result<f64> {
    check_shapes(points, indet, centers, cfg)?;
    let k = cfg.num_clusters;
    check_partition_shape(part, points.nrows(), k)?;
    let m = cfg.m;
    let mut total = 0.0;
    for (i, x) in points.rows().into_iter().enumerate() {
        let d2 = squared_distances(x, centers);
        let a = cfg.w1 * indet[i];
        let b = cfg.w2 * (1.0 - indet[i]);
        let main: f64 = (0..k).map(|j| (a * part.t[[i, j]]).powf(m) * d2[j]).sum();
        let base = k as f64 - d2.iter().sum::<f64>();
        total += main + (b * part.f[i]).powf(m) * base;
    }
    Ok(total)
}

struct RowUpdate {
    t: Vec<f64>,
    f: f64,
    clamped: bool,
    singular: bool,
}

fn update_row(
    x: ArrayView1<f64>,
    indet: f64,
    centers: ArrayView2<f64>,
    cfg: &SolverConfig,
) -> RowUpdate {
    let k = cfg.num_clusters;
    let delta = cfg.singular_delta;
    let d2 = squared_distances(x, centers);

    let mut nearest: Option<usize> = None;
    for (j, &d) in d2.iter().enumerate() {
        if d < delta * delta && nearest.is_none_or(|b| d < d2[b]) {
            nearest = Some(j);
        }
    }
    if let Some(j) = nearest {
        let mut t = vec![0.0; k];
        t[j] = 1.0;
        return RowUpdate {
            t,
            f: 0.0,
            clamped: false,
            singular: true,
        };
    }

    let e = 1.0 / (cfg.m - 1.0);
    let a = cfg.w1 * indet;
    let b = cfg.w2 * (1.0 - indet);
    let mut base = k as f64 - d2.iter().sum::<f64>();
    let clamped = base <= 0.0;
    if clamped {
        base = delta;
    }
    let main_terms: Vec<f64> = d2.iter().map(|&d| d.powf(-e)).collect();
    let noise_term = base.powf(-e);
    let denom: f64 = main_terms.iter().map(|&v| v / a).sum::<f64>() + noise_term / b;
    let kt = 1.0 / denom;
    RowUpdate {
        t: main_terms.iter().map(|&v| kt / a * v).collect(),
        f: kt / b * noise_term,
        clamped,
        singular: false,
    }
}

/// Normalization factor `K_temp` of a row; the multiplier is `m * K_temp^(m-1)`.
pub fn membership_scale(
    x: ArrayView1<f64>,
    indet: f64,
    centers: ArrayView2<f64>,
    cfg: &SolverConfig,
) -> f64 {
    let e = 1.0 / (cfg.m - 1.0);
    let d2 = squared_distances(x, centers);
    let a = cfg.w1 * indet;
    let b = cfg.w2 * (1.0 - indet);
    let base = (cfg.num_clusters as f64 - d2.iter().sum::<f64>()).max(cfg.singular_delta);
    1.0 / (d2.iter().map(|&d| d.powf(-e) / a).sum::<f64>() + base.powf(-e) / b)
}

/// Closed-form membership update for fixed centers.
pub fn update_memberships(
    points: ArrayView2<f64>,
    indet: &[f64],
    centers: ArrayView2<f64>,
    cfg: &SolverConfig,
) -> Result<(NeutrosophicPartition, Diagnostics)> {
    check_shapes(points, indet, centers, cfg)?;
    if centers.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("non-finite center".into()));
    }
    let n = points.nrows();
    let k = cfg.num_clusters;
    let rows: Vec<RowUpdate> = (0..n)
        .into_par_iter()
        .map(|i| update_row(points.row(i), indet[i], centers, cfg))
        .collect();

    let mut t = Array2::zeros((n, k));
    let mut f = Array1::zeros(n);
    let mut diag = Diagnostics::default();
    for (i, row) in rows.into_iter().enumerate() {
        t.row_mut(i).assign(&ArrayView1::from(&row.t));
        f[i] = row.f;
        diag.clamped_bases += usize::from(row.clamped);
        diag.singular_rows += usize::from(row.singular);
    }
    if diag.clamped_bases > 0 {
        warn!(
            "{} points had a non-positive noise base; clamped to {}",
            diag.clamped_bases, cfg.singular_delta
        );
    }
    Ok((NeutrosophicPartition { t, f }, diag))
}

/// Per-point, per-cluster center weights under `rule`.
pub fn center_weights(
    indet: &[f64],
    part: &NeutrosophicPartition,
    cfg: &SolverConfig,
    rule: CenterRule,
) -> Array2<f64> {
    let m = cfg.m;
    let (n, k) = part.t.dim();
    Array2::from_shape_fn((n, k), |(i, j)| match rule {
        CenterRule::Determinacy => (cfg.w1 * (1.0 - indet[i]) * part.t[[i, j]]).powf(m),
        CenterRule::Stationary => {
            (cfg.w1 * indet[i] * part.t[[i, j]]).powf(m)
                - (cfg.w2 * (1.0 - indet[i]) * part.f[i]).powf(m)
        }
    })
}

/// Weighted-mean center update; a cluster whose weight sum vanishes keeps its previous center.
pub fn update_centers(
    points: ArrayView2<f64>,
    indet: &[f64],
    part: &NeutrosophicPartition,
    prev: ArrayView2<f64>,
    cfg: &SolverConfig,
    rule: CenterRule,
) -> Result<(Array2<f64>, Diagnostics)> {
    check_shapes(points, indet, prev, cfg)?;
    check_partition_shape(part, points.nrows(), cfg.num_clusters)?;
    let weights = center_weights(indet, part, cfg, rule);
    let mut centers = prev.to_owned();
    let mut diag = Diagnostics::default();
    for j in 0..cfg.num_clusters {
        let w = weights.column(j);
        let total: f64 = w.sum();
        if !(total.abs() >= cfg.singular_delta) {
            diag.center_fallbacks += 1;
            debug!("center {j}: weight sum {total:e}, keeping previous center");
            continue;
        }
        let mut acc = Array1::<f64>::zeros(points.ncols());
        for (i, x) in points.rows().into_iter().enumerate() {
            acc.scaled_add(w[i], &x);
        }
        centers.row_mut(j).assign(&(acc / total));
    }
    Ok((centers, diag))
}

/// Which set of partial derivatives [`lagrangian_gradients`] returns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GradientForm {
    /// True partials of the Lagrangian, including the chain-rule factors.
    Exact,
    /// The textbook partials whose zero set is the closed-form membership update:
    /// `m (w1 I T)^(m-1) d2 - lambda` and `m (w2 (1-I) F)^(m-1) (k - sum d2) - lambda`.
    Textbook,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LagrangianGradients {
    pub d_t: Array2<f64>,
    pub d_f: Array1<f64>,
    pub d_c: Array2<f64>,
}

/// `L = cost - sum_i lambda_i (sum_j T_ij + F_i - 1)`.
pub fn lagrangian(
    points: ArrayView2<f64>,
    indet: &[f64],
    part: &NeutrosophicPartition,
    centers: ArrayView2<f64>,
    lambda: &[f64],
    cfg: &SolverConfig,
) -> Result<f64> {
    let cost = compute_cost(points, indet, part, centers, cfg)?;
    if lambda.len() != points.nrows() {
        return Err(Error::ShapeMismatch("lambda length".into()));
    }
    let penalty: f64 = (0..part.len())
        .map(|i| lambda[i] * (part.t.row(i).sum() + part.f[i] - 1.0))
        .sum();
    Ok(cost - penalty)
}

pub fn lagrangian_gradients(
    points: ArrayView2<f64>,
    indet: &[f64],
    part: &NeutrosophicPartition,
    centers: ArrayView2<f64>,
    lambda: &[f64],
    cfg: &SolverConfig,
    form: GradientForm,
) -> Result<LagrangianGradients> {
    check_shapes(points, indet, centers, cfg)?;
    let (n, d) = points.dim();
    let k = cfg.num_clusters;
    check_partition_shape(part, n, k)?;
    if lambda.len() != n {
        return Err(Error::ShapeMismatch("lambda length".into()));
    }
    let m = cfg.m;
    let mut d_t = Array2::zeros((n, k));
    let mut d_f = Array1::zeros(n);
    let mut d_c = Array2::zeros((k, d));
    let c_factor = match form {
        GradientForm::Exact => -2.0,
        GradientForm::Textbook => -1.0,
    };
    for (i, x) in points.rows().into_iter().enumerate() {
        let d2 = squared_distances(x, centers);
        let a = cfg.w1 * indet[i];
        let b = cfg.w2 * (1.0 - indet[i]);
        let base = k as f64 - d2.iter().sum::<f64>();
        let fi = part.f[i];
        for j in 0..k {
            let tij = part.t[[i, j]];
            d_t[[i, j]] = match form {
                GradientForm::Exact => m * a.powf(m) * tij.powf(m - 1.0) * d2[j],
                GradientForm::Textbook => m * (a * tij).powf(m - 1.0) * d2[j],
            } - lambda[i];
        }
        d_f[i] = match form {
            GradientForm::Exact => m * b.powf(m) * fi.powf(m - 1.0) * base,
            GradientForm::Textbook => m * (b * fi).powf(m - 1.0) * base,
        } - lambda[i];
        let noise = (b * fi).powf(m);
        for j in 0..k {
            let w = (a * part.t[[i, j]]).powf(m) - noise;
            for q in 0..d {
                d_c[[j, q]] += c_factor * w * (x[q] - centers[[j, q]]);
            }
        }
    }
    Ok(LagrangianGradients { d_t, d_f, d_c })
}

/// Multipliers implied by the closed-form membership update: `m * K_temp^(m-1)` per point.
pub fn implied_multipliers(
    points: ArrayView2<f64>,
    indet: &[f64],
    centers: ArrayView2<f64>,
    cfg: &SolverConfig,
) -> Vec<f64> {
    points
        .rows()
        .into_iter()
        .zip(indet)
        .map(|(x, &ind)| cfg.m * membership_scale(x, ind, centers, cfg).powf(cfg.m - 1.0))
        .collect()
}

fn max_abs_diff(a: &Array2<f64>, b: &Array2<f64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn count_outside_box(points: ArrayView2<f64>, centers: &Array2<f64>) -> usize {
    let mut outside = 0;
    for q in 0..points.ncols() {
        let col = points.column(q);
        let lo = col.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = col.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let pad = 0.1 * (hi - lo);
        outside += centers
            .column(q)
            .iter()
            .filter(|&&c| !(c >= lo - pad && c <= hi + pad))
            .count();
    }
    outside
}

/// Runs the alternating updates from the given centers. `observer` sees every iteration's
/// partition and centers.
pub fn fit_from_centers(
    points: ArrayView2<f64>,
    indet: &[f64],
    initial: NeutrosophicPartition,
    centers: Array2<f64>,
    cfg: &SolverConfig,
    mut observer: impl FnMut(usize, &NeutrosophicPartition, &Array2<f64>),
) -> Result<FitResult> {
    cfg.validate()?;
    check_shapes(points, indet, centers.view(), cfg)?;
    check_partition_shape(&initial, points.nrows(), cfg.num_clusters)?;
    let mut part = initial;
    let mut centers = centers;
    let mut trace = Vec::new();
    let mut diag = Diagnostics::default();
    let mut converged = false;
    for iter in 1..=cfg.max_iter {
        let (next, d1) = update_memberships(points, indet, centers.view(), cfg)?;
        let change = max_abs_diff(&next.t, &part.t);
        let (next_centers, d2) =
            update_centers(points, indet, &next, centers.view(), cfg, cfg.center_rule)?;
        diag.absorb(d1);
        diag.absorb(d2);
        part = next;
        centers = next_centers;
        trace.push(compute_cost(points, indet, &part, centers.view(), cfg)?);
        observer(iter, &part, &centers);
        if change < cfg.eps_conv {
            converged = true;
            break;
        }
    }
    diag.centers_outside_box = count_outside_box(points, &centers);
    if diag.centers_outside_box > 0 {
        warn!(
            "{} center coordinates lie outside the padded data bounding box",
            diag.centers_outside_box
        );
    }
    Ok(FitResult {
        partition: part,
        centers,
        indeterminacy: indet.to_vec(),
        iterations: trace.len(),
        converged,
        cost_trace: trace,
        diagnostics: diag,
        seed: cfg.seed,
        restart_costs: Vec::new(),
    })
}

/// One run from `seed`.
pub fn fit_seeded(
    points: ArrayView2<f64>,
    indet: &[f64],
    cfg: &SolverConfig,
    seed: u64,
    observer: impl FnMut(usize, &NeutrosophicPartition, &Array2<f64>),
) -> Result<FitResult> {
    let (part, centers) = initialize(points, indet, cfg, seed)?;
    let mut result = fit_from_centers(points, indet, part, centers, cfg, observer)?;
    result.seed = seed;
    Ok(result)
}

/// `cfg.restarts` runs with derived seeds; the lowest final cost wins (earliest on ties).
pub fn fit(points: ArrayView2<f64>, indet: &[f64], cfg: &SolverConfig) -> Result<FitResult> {
    fit_observed(points, indet, cfg, |_, _, _| {})
}

pub fn fit_observed(
    points: ArrayView2<f64>,
    indet: &[f64],
    cfg: &SolverConfig,
    mut observer: impl FnMut(usize, &NeutrosophicPartition, &Array2<f64>),
) -> Result<FitResult> {
    cfg.validate()?;
    let mut best: Option<FitResult> = None;
    let mut costs = Vec::with_capacity(cfg.restarts);
    for r in 0..cfg.restarts {
        let seed = cfg.restart_seed(r);
        let run = fit_seeded(points, indet, cfg, seed, &mut observer)?;
        let cost = run.final_cost();
        debug!(
            "restart {r} (seed {seed}): cost {cost:e}, {} iterations",
            run.iterations
        );
        costs.push(cost);
        if best.as_ref().is_none_or(|b| cost < b.final_cost()) {
            best = Some(run);
        }
    }
    let mut best = best.expect("at least one restart");
    best.restart_costs = costs;
    Ok(best)
}

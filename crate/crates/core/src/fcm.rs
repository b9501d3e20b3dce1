//! Standard fuzzy c-means.

use ndarray::{Array1, Array2, ArrayView2};
use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::squared_distance;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FcmConfig {
    pub num_clusters: usize,
    pub m: f64,
    pub eps_conv: f64,
    pub max_iter: usize,
    pub seed: u64,
    pub singular_delta: f64,
}

impl Default for FcmConfig {
    fn default() -> Self {
        Self {
            num_clusters: 2,
            m: 2.0,
            eps_conv: 1e-6,
            max_iter: 300,
            seed: 0,
            singular_delta: 1e-9,
        }
    }
}

impl FcmConfig {
    pub fn validate(&self) -> Result<()> {
        if self.num_clusters < 2 {
            return Err(Error::InvalidConfig("c must be at least 2".into()));
        }
        if !(self.m > 1.0 && self.m.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "m must exceed 1, got {}",
                self.m
            )));
        }
        if !(self.eps_conv > 0.0) || self.max_iter == 0 || !(self.singular_delta > 0.0) {
            return Err(Error::InvalidConfig(
                "eps_conv, max_iter and singular_delta must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct FcmResult {
    /// n x c memberships, rows sum to 1.
    pub w: Array2<f64>,
    pub centers: Array2<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// Objective after every iteration.
    pub objective_trace: Vec<f64>,
}

impl FcmResult {
    /// Argmax cluster per point, lowest index on ties.
    pub fn hard_labels(&self) -> Vec<usize> {
        self.w
            .rows()
            .into_iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .fold((0, f64::NEG_INFINITY), |best, (j, &v)| {
                        if v > best.1 {
                            (j, v)
                        } else {
                            best
                        }
                    })
                    .0
            })
            .collect()
    }
}

/// `sum_i sum_j w_ij^m ||x_i - c_j||^2`.
pub fn fcm_objective(
    points: ArrayView2<f64>,
    w: &Array2<f64>,
    centers: &Array2<f64>,
    m: f64,
) -> f64 {
    let mut total = 0.0;
    for (i, x) in points.rows().into_iter().enumerate() {
        for (j, c) in centers.rows().into_iter().enumerate() {
            total += w[[i, j]].powf(m) * squared_distance(x, c);
        }
    }
    total
}

fn membership_row(x: ndarray::ArrayView1<f64>, centers: &Array2<f64>, cfg: &FcmConfig) -> Vec<f64> {
    let c = centers.nrows();
    let d2: Vec<f64> = centers
        .rows()
        .into_iter()
        .map(|cj| squared_distance(x, cj))
        .collect();
    let tiny = cfg.singular_delta * cfg.singular_delta;
    let mut nearest: Option<usize> = None;
    for (j, &d) in d2.iter().enumerate() {
        if d < tiny && nearest.is_none_or(|b| d < d2[b]) {
            nearest = Some(j);
        }
    }
    if let Some(j) = nearest {
        let mut row = vec![0.0; c];
        row[j] = 1.0;
        return row;
    }
    // (d_j / d_l)^(2/(m-1)) = (d2_j / d2_l)^(1/(m-1))
    let e = 1.0 / (cfg.m - 1.0);
    (0..c)
        .map(|j| 1.0 / (0..c).map(|l| (d2[j] / d2[l]).powf(e)).sum::<f64>())
        .collect()
}

/// Membership update for fixed centers.
pub fn fcm_memberships(
    points: ArrayView2<f64>,
    centers: &Array2<f64>,
    cfg: &FcmConfig,
) -> Array2<f64> {
    let n = points.nrows();
    let c = centers.nrows();
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| membership_row(points.row(i), centers, cfg))
        .collect();
    let mut w = Array2::zeros((n, c));
    for (i, row) in rows.into_iter().enumerate() {
        for (j, v) in row.into_iter().enumerate() {
            w[[i, j]] = v;
        }
    }
    w
}

/// Weighted-mean center update with weights `w^m`.
pub fn fcm_centers(
    points: ArrayView2<f64>,
    w: &Array2<f64>,
    prev: &Array2<f64>,
    m: f64,
) -> Array2<f64> {
    let mut centers = prev.clone();
    for j in 0..w.ncols() {
        let mut acc = Array1::<f64>::zeros(points.ncols());
        let mut total = 0.0;
        for (i, x) in points.rows().into_iter().enumerate() {
            let wm = w[[i, j]].powf(m);
            acc.scaled_add(wm, &x);
            total += wm;
        }
        if total > 0.0 {
            centers.row_mut(j).assign(&(acc / total));
        }
    }
    centers
}

/// Random row-stochastic start, then alternate center and membership updates until the
/// largest membership change is at most `eps_conv`.
pub fn fcm_fit(points: ArrayView2<f64>, cfg: &FcmConfig) -> Result<FcmResult> {
    cfg.validate()?;
    let (n, d) = points.dim();
    let c = cfg.num_clusters;
    if n < c {
        return Err(Error::NotEnoughPoints {
            points: n,
            clusters: c,
        });
    }
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(cfg.seed);
    let mut w = Array2::from_shape_fn((n, c), |_| rng.random::<f64>() + f64::EPSILON);
    for mut row in w.rows_mut() {
        let s = row.sum();
        row.mapv_inplace(|v| v / s);
    }
    let mut centers = fcm_centers(points, &w, &Array2::zeros((c, d)), cfg.m);
    let mut trace = Vec::new();
    let mut converged = false;
    for _ in 0..cfg.max_iter {
        let next = fcm_memberships(points, &centers, cfg);
        let change = next
            .iter()
            .zip(w.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        w = next;
        centers = fcm_centers(points, &w, &centers, cfg.m);
        trace.push(fcm_objective(points, &w, &centers, cfg.m));
        if change <= cfg.eps_conv {
            converged = true;
            break;
        }
    }
    Ok(FcmResult {
        w,
        centers,
        iterations: trace.len(),
        converged,
        objective_trace: trace,
    })
}

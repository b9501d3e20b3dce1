//! Per-point indeterminacy from local density.

use ndarray::ArrayView2;
use rayon::prelude::*;

use crate::dataset::squared_distance;
use crate::error::{Error, Result};

/// Number of other points strictly closer than `eps` to each point.
pub fn neighbor_counts(points: ArrayView2<f64>, eps: f64) -> Result<Vec<usize>> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "eps must be positive, got {eps}"
        )));
    }
    if points.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("non-finite coordinate".into()));
    }
    if points.ncols() == 1 {
        return Ok(neighbor_counts_1d(points, eps));
    }
    let n = points.nrows();
    Ok((0..n)
        .into_par_iter()
        .map(|i| {
            let xi = points.row(i);
            (0..n)
                .filter(|&j| j != i && squared_distance(xi, points.row(j)).sqrt() < eps)
                .count()
        })
        .collect())
}

// Sorted sweep; the same strict |a - b| < eps test as the general path.
fn neighbor_counts_1d(points: ArrayView2<f64>, eps: f64) -> Vec<usize> {
    let mut sorted: Vec<f64> = points.column(0).to_vec();
    sorted.sort_by(f64::total_cmp);
    points
        .column(0)
        .iter()
        .map(|&x| {
            // first index with (x - v) < eps, i.e. v > x - eps
            let lo = sorted.partition_point(|&v| x - v >= eps);
            let hi = sorted.partition_point(|&v| v - x < eps);
            hi - lo - 1
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndeterminacyParams {
    pub num_clusters: usize,
    pub eps: f64,
    pub np_threshold: usize,
    pub alpha: f64,
}

impl IndeterminacyParams {
    pub fn validate(&self) -> Result<()> {
        if self.num_clusters < 2 {
            return Err(Error::InvalidConfig(
                "num_clusters must be at least 2".into(),
            ));
        }
        if !(self.alpha > 0.0 && self.alpha < 0.5) {
            return Err(Error::InvalidConfig(format!(
                "alpha must lie in (0, 0.5), got {}",
                self.alpha
            )));
        }
        if self.np_threshold == 0 {
            return Err(Error::InvalidConfig(
                "np_threshold must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Maps neighbor counts to indeterminacy: sparse points get `1 - NP/(N/NC)`, dense points
/// get `alpha`, everything clamped to `[alpha, 1 - alpha]`.
pub fn indeterminacy_from_counts(
    counts: &[usize],
    params: &IndeterminacyParams,
) -> Result<Vec<f64>> {
    params.validate()?;
    let n = counts.len() as f64;
    let per_cluster = n / params.num_clusters as f64;
    let a = params.alpha;
    Ok(counts
        .iter()
        .map(|&np| {
            let raw = if np < params.np_threshold {
                1.0 - np as f64 / per_cluster
            } else {
                a
            };
            raw.clamp(a, 1.0 - a)
        })
        .collect())
}

pub fn compute_indeterminacy(
    points: ArrayView2<f64>,
    params: &IndeterminacyParams,
) -> Result<Vec<f64>> {
    params.validate()?;
    let counts = neighbor_counts(points, params.eps)?;
    indeterminacy_from_counts(&counts, params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{generate_diamond, DiamondSpec};
    use ndarray::Array2;
    use proptest::prelude::*;

    fn params(k: usize) -> IndeterminacyParams {
        IndeterminacyParams {
            num_clusters: k,
            eps: 4.0,
            np_threshold: 4,
            alpha: 0.05,
        }
    }

    fn brute(points: ArrayView2<f64>, eps: f64) -> Vec<usize> {
        let n = points.nrows();
        (0..n)
            .map(|i| {
                (0..n)
                    .filter(|&j| {
                        j != i && {
                            let d: f64 = points
                                .row(i)
                                .iter()
                                .zip(points.row(j))
                                .map(|(a, b)| (a - b).powi(2))
                                .sum::<f64>()
                                .sqrt();
                            d < eps
                        }
                    })
                    .count()
            })
            .collect()
    }

    #[test]
    fn collinear_counts() {
        let pts = Array2::from_shape_vec((3, 1), vec![0.0, 1.0, 10.0]).unwrap();
        assert_eq!(neighbor_counts(pts.view(), 2.0).unwrap(), vec![1, 1, 0]);
        let pts2 = Array2::from_shape_vec((3, 2), vec![0.0, 0.0, 1.0, 0.0, 10.0, 0.0]).unwrap();
        assert_eq!(neighbor_counts(pts2.view(), 2.0).unwrap(), vec![1, 1, 0]);
    }

    #[test]
    fn single_point_has_no_neighbors() {
        let pts = Array2::from_shape_vec((1, 2), vec![1.0, 2.0]).unwrap();
        assert_eq!(neighbor_counts(pts.view(), 100.0).unwrap(), vec![0]);
    }

    #[test]
    fn strict_inequality_at_eps() {
        let pts = Array2::from_shape_vec((2, 1), vec![0.0, 2.0]).unwrap();
        assert_eq!(neighbor_counts(pts.view(), 2.0).unwrap(), vec![0, 0]);
        let pts = Array2::from_shape_vec((2, 2), vec![0.0, 0.0, 2.0, 0.0]).unwrap();
        assert_eq!(neighbor_counts(pts.view(), 2.0).unwrap(), vec![0, 0]);
    }

    #[test]
    fn x12_motif_points_dense_outlier_isolated() {
        let spec = DiamondSpec {
            num_clusters: 2,
            motif_scale: 1.0,
            center_spacing: 6.0,
            boundary_points_per_gap: 1,
            outliers: vec![[3.0, 5.0]],
            layout: crate::dataset::Layout::Collinear,
            motif: crate::dataset::Motif::Five,
        };
        let data = generate_diamond(&spec, true).unwrap();
        let counts = neighbor_counts(data.points(), 4.0).unwrap();
        assert_eq!(counts, brute(data.points(), 4.0));
        let labels = data.labels().unwrap();
        for (i, &c) in counts.iter().enumerate() {
            if labels[i] < 2 {
                assert!(c >= 4, "motif point {i} has {c} neighbors");
            }
        }
        assert_eq!(counts[11], 0);
    }

    #[test]
    fn formula_examples() {
        let mut counts = vec![5; 12];
        counts[0] = 1;
        counts[1] = 4;
        counts[2] = 0;
        let i = indeterminacy_from_counts(&counts, &params(2)).unwrap();
        assert!((i[0] - (1.0 - 1.0 / 6.0)).abs() < 1e-15);
        assert_eq!(i[1], 0.05);
        assert_eq!(i[2], 0.95);
        assert_eq!(i[3], 0.05);
    }

    #[test]
    fn rejects_bad_params() {
        let pts = Array2::zeros((3, 2));
        let mut p = params(2);
        p.alpha = 0.5;
        assert!(compute_indeterminacy(pts.view(), &p).is_err());
        let mut p = params(1);
        p.alpha = 0.05;
        assert!(compute_indeterminacy(pts.view(), &p).is_err());
        let mut p = params(2);
        p.np_threshold = 0;
        assert!(compute_indeterminacy(pts.view(), &p).is_err());
        let mut p = params(2);
        p.eps = 0.0;
        assert!(compute_indeterminacy(pts.view(), &p).is_err());
    }

    fn arb_points() -> impl Strategy<Value = (usize, Vec<f64>)> {
        (1usize..4).prop_flat_map(|d| {
            (
                Just(d),
                prop::collection::vec((-20i32..20).prop_map(|v| v as f64 / 2.0), d..(40 * d)),
            )
        })
    }

    proptest! {
        #[test]
        fn counts_match_brute_force((d, flat) in arb_points(), eps in 0.1f64..8.0) {
            let n = flat.len() / d;
            let pts = Array2::from_shape_vec((n, d), flat[..n * d].to_vec()).unwrap();
            let counts = neighbor_counts(pts.view(), eps).unwrap();
            prop_assert_eq!(&counts, &brute(pts.view(), eps));
            prop_assert!(counts.iter().all(|&c| c < n));
        }

        #[test]
        fn values_bounded_and_permutation_equivariant(
            (d, flat) in arb_points(),
            k in 2usize..5,
            shift in 0usize..1000,
        ) {
            let n = flat.len() / d;
            let pts = Array2::from_shape_vec((n, d), flat[..n * d].to_vec()).unwrap();
            let p = IndeterminacyParams { num_clusters: k, eps: 1.5, np_threshold: 3, alpha: 0.05 };
            let vals = compute_indeterminacy(pts.view(), &p).unwrap();
            prop_assert!(vals.iter().all(|&v| (0.05..=0.95).contains(&v)));
            let order: Vec<usize> = (0..n).map(|i| (i + shift) % n).collect();
            let permuted = pts.select(ndarray::Axis(0), &order);
            let pvals = compute_indeterminacy(permuted.view(), &p).unwrap();
            for (new_i, &old_i) in order.iter().enumerate() {
                prop_assert_eq!(pvals[new_i].to_bits(), vals[old_i].to_bits());
            }
        }

        #[test]
        fn sparser_is_more_indeterminate(a in 0usize..4, b in 0usize..4, n in 8usize..100) {
            prop_assume!(a < b);
            let mut counts = vec![10; n];
            counts[0] = a;
            counts[1] = b;
            let v = indeterminacy_from_counts(&counts, &params(2)).unwrap();
            prop_assert!(v[0] >= v[1]);
        }
    }
}

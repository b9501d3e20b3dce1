//! Hard labels from a neutrosophic partition, and label-matching accuracy.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::metrics::max_matching;
use crate::solver::NeutrosophicPartition;

/// Row-sum tolerance accepted by [`assign`].
pub const ROW_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PointLabel {
    Main {
        cluster: usize,
    },
    /// `a < b`; `lead` is whichever of the two has the larger T (lower id on ties).
    Boundary {
        a: usize,
        b: usize,
        lead: usize,
    },
    Outlier,
}

impl PointLabel {
    pub fn kind(&self) -> &'static str {
        match self {
            PointLabel::Main { .. } => "main",
            PointLabel::Boundary { .. } => "boundary",
            PointLabel::Outlier => "outlier",
        }
    }

    /// Main cluster used for scoring; outliers have none.
    pub fn resolved(&self) -> Option<usize> {
        match *self {
            PointLabel::Main { cluster } => Some(cluster),
            PointLabel::Boundary { lead, .. } => Some(lead),
            PointLabel::Outlier => None,
        }
    }
}

/// Top two `(index, value)` pairs of a row, lowest index first on ties.
fn top_two(row: impl Iterator<Item = f64>) -> ((usize, f64), Option<(usize, f64)>) {
    let mut first = (usize::MAX, f64::NEG_INFINITY);
    let mut second: Option<(usize, f64)> = None;
    for (j, v) in row.enumerate() {
        if v > first.1 {
            second = (first.0 != usize::MAX).then_some(first);
            first = (j, v);
        } else if second.is_none_or(|s| v > s.1) {
            second = Some((j, v));
        }
    }
    (first, second)
}

/// Outlier if F beats every T; boundary if the two largest T both lie strictly inside
/// `(t, 1 - t)`; otherwise the argmax cluster.
pub fn assign(part: &NeutrosophicPartition, t: f64) -> Result<Vec<PointLabel>> {
    if !(t > 0.0 && t < 0.5) {
        return Err(Error::InvalidConfig(format!(
            "t must lie in (0, 0.5), got {t}"
        )));
    }
    part.check(ROW_TOLERANCE)?;
    if part.num_clusters() == 0 {
        return Err(Error::InvalidInput("partition has no clusters".into()));
    }
    let inside = |v: f64| v > t && v < 1.0 - t;
    Ok(part
        .t
        .rows()
        .into_iter()
        .zip(part.f.iter())
        .map(|(row, &f)| {
            let (first, second) = top_two(row.iter().copied());
            if f > first.1 {
                return PointLabel::Outlier;
            }
            match second {
                Some(second) if inside(first.1) && inside(second.1) => PointLabel::Boundary {
                    a: first.0.min(second.0),
                    b: first.0.max(second.0),
                    lead: first.0,
                },
                _ => PointLabel::Main { cluster: first.0 },
            }
        })
        .collect())
}

/// Best one-to-one cluster/class agreement divided by `n`. Boundary points count for their
/// lead cluster, outliers are always wrong.
pub fn accuracy(predicted: &[PointLabel], truth: &[usize]) -> Result<f64> {
    if predicted.len() != truth.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} labels for {} truth entries",
            predicted.len(),
            truth.len()
        )));
    }
    if truth.is_empty() {
        return Err(Error::InvalidInput("accuracy of an empty labeling".into()));
    }
    let rows = predicted
        .iter()
        .filter_map(PointLabel::resolved)
        .max()
        .map_or(0, |m| m + 1);
    let cols = truth.iter().max().map_or(0, |m| m + 1);
    let mut table = vec![vec![0usize; cols]; rows];
    for (label, &class) in predicted.iter().zip(truth) {
        if let Some(p) = label.resolved() {
            table[p][class] += 1;
        }
    }
    Ok(max_matching(&table).0 as f64 / truth.len() as f64)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct LabelCounts {
    pub main: usize,
    pub boundary: usize,
    pub outlier: usize,
}

pub fn count_kinds(labels: &[PointLabel]) -> LabelCounts {
    let mut c = LabelCounts::default();
    for l in labels {
        match l {
            PointLabel::Main { .. } => c.main += 1,
            PointLabel::Boundary { .. } => c.boundary += 1,
            PointLabel::Outlier => c.outlier += 1,
        }
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{array, Array1, Array2};
    use proptest::prelude::*;

    fn row(t: &[f64], f: f64) -> NeutrosophicPartition {
        NeutrosophicPartition {
            t: Array2::from_shape_vec((1, t.len()), t.to_vec()).unwrap(),
            f: array![f],
        }
    }

    #[test]
    fn labeled_table_rows() {
        assert_eq!(
            assign(&row(&[0.4998, 0.4998], 0.0004), 0.4).unwrap(),
            vec![PointLabel::Boundary {
                a: 0,
                b: 1,
                lead: 0
            }]
        );
        assert_eq!(
            assign(&row(&[0.0765, 0.0765], 0.847), 0.4).unwrap(),
            vec![PointLabel::Outlier]
        );
        assert_eq!(
            assign(&row(&[0.9515, 0.0479], 0.0006), 0.4).unwrap(),
            vec![PointLabel::Main { cluster: 0 }]
        );
    }

    #[test]
    fn boundary_ids_sorted_and_lead_is_larger() {
        let labels = assign(&row(&[0.05, 0.42, 0.5], 0.03), 0.4).unwrap();
        assert_eq!(
            labels,
            vec![PointLabel::Boundary {
                a: 1,
                b: 2,
                lead: 2
            }]
        );
    }

    #[test]
    fn outlier_checked_before_boundary() {
        let labels = assign(&row(&[0.3, 0.3], 0.4), 0.25).unwrap();
        assert_eq!(labels[0], PointLabel::Outlier);
    }

    #[test]
    fn argmax_ties_take_lowest_index() {
        let labels = assign(&row(&[0.1; 10], 0.0), 0.4).unwrap();
        assert_eq!(labels[0], PointLabel::Main { cluster: 0 });
        let labels = assign(&row(&[0.05, 0.45, 0.45, 0.05], 0.0), 0.2).unwrap();
        assert_eq!(
            labels[0],
            PointLabel::Boundary {
                a: 1,
                b: 2,
                lead: 1
            }
        );
    }

    #[test]
    fn malformed_partition_rejected() {
        assert!(assign(&row(&[0.5, 0.6], 0.0), 0.4).is_err());
        assert!(assign(&row(&[0.5, 0.5], 0.0), 0.5).is_err());
    }

    #[test]
    fn accuracy_examples() {
        let truth = [0, 0, 1, 1];
        let pred = [
            PointLabel::Main { cluster: 1 },
            PointLabel::Main { cluster: 1 },
            PointLabel::Boundary {
                a: 0,
                b: 1,
                lead: 0,
            },
            PointLabel::Outlier,
        ];
        assert_eq!(accuracy(&pred, &truth).unwrap(), 0.75);
        let all_one = vec![PointLabel::Main { cluster: 0 }; 150];
        let balanced: Vec<usize> = (0..150).map(|i| i / 50).collect();
        assert!((accuracy(&all_one, &balanced).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!(accuracy(&pred, &truth[..3]).is_err());
    }

    #[test]
    fn all_outliers_score_zero() {
        let pred = vec![PointLabel::Outlier; 4];
        assert_eq!(accuracy(&pred, &[0, 1, 0, 1]).unwrap(), 0.0);
    }

    fn arb_partition() -> impl Strategy<Value = (NeutrosophicPartition, Vec<usize>)> {
        (2usize..5, 1usize..40).prop_flat_map(|(k, n)| {
            (
                prop::collection::vec(prop::collection::vec(0.001f64..1.0, k + 1), n),
                prop::collection::vec(0usize..3, n),
            )
                .prop_map(move |(rows, truth)| {
                    let mut t = Array2::zeros((n, k));
                    let mut f = Array1::zeros(n);
                    for (i, r) in rows.iter().enumerate() {
                        let s: f64 = r.iter().sum();
                        for j in 0..k {
                            t[[i, j]] = r[j] / s;
                        }
                        f[i] = r[k] / s;
                    }
                    (NeutrosophicPartition { t, f }, truth)
                })
        })
    }

    proptest! {
        #[test]
        fn accuracy_bounds_and_relabel_invariance((part, truth) in arb_partition(), rot in 0usize..5) {
            let labels = assign(&part, 0.4).unwrap();
            let k = part.num_clusters();
            let relabel = |l: &PointLabel| match *l {
                PointLabel::Main { cluster } => PointLabel::Main { cluster: (cluster + rot) % k },
                PointLabel::Boundary { a, b, lead } => {
                    let (a, b) = ((a + rot) % k, (b + rot) % k);
                    PointLabel::Boundary { a: a.min(b), b: a.max(b), lead: (lead + rot) % k }
                }
                PointLabel::Outlier => PointLabel::Outlier,
            };
            let moved: Vec<PointLabel> = labels.iter().map(relabel).collect();
            let a = accuracy(&labels, &truth).unwrap();
            prop_assert_eq!(a, accuracy(&moved, &truth).unwrap());
            prop_assert!(a <= 1.0);
            if labels.iter().any(|l| l.resolved().is_some()) {
                prop_assert!(a >= 1.0 / truth.len() as f64);
            }
        }

        #[test]
        fn main_argmax_survives_rescaling((part, _) in arb_partition(), scale in 0.1f64..0.99) {
            let labels = assign(&part, 0.4).unwrap();
            let mut scaled = part.clone();
            for i in 0..part.len() {
                let f = part.f[i];
                let s: f64 = part.t.row(i).sum();
                let target = (1.0 - f) * scale;
                scaled.t.row_mut(i).mapv_inplace(|v| v / s * target);
                scaled.f[i] = 1.0 - target;
            }
            let argmax = |p: &NeutrosophicPartition, i: usize| top_two(p.t.row(i).iter().copied()).0 .0;
            for (i, l) in labels.iter().enumerate() {
                if let PointLabel::Main { cluster } = l {
                    prop_assert_eq!(*cluster, argmax(&scaled, i));
                }
            }
        }
    }
}

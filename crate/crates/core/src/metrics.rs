//! Contingency tables and optimal one-to-one label matching.

use crate::error::{Error, Result};

/// `table[p][t]` counts points with predicted id `p` and true id `t`.
pub fn contingency(predicted: &[usize], truth: &[usize]) -> Result<Vec<Vec<usize>>> {
    if predicted.len() != truth.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} predictions for {} truth labels",
            predicted.len(),
            truth.len()
        )));
    }
    let rows = predicted.iter().max().map_or(0, |m| m + 1);
    let cols = truth.iter().max().map_or(0, |m| m + 1);
    let mut table = vec![vec![0usize; cols]; rows];
    for (&p, &t) in predicted.iter().zip(truth) {
        table[p][t] += 1;
    }
    Ok(table)
}

/// Minimum-cost perfect assignment on a square matrix (shortest augmenting path with
/// potentials, O(n^3)). Returns `col_of_row`.
pub fn hungarian_min(cost: &[Vec<f64>]) -> Vec<usize> {
    let n = cost.len();
    if n == 0 {
        return Vec::new();
    }
    // 1-based internals; index 0 is the virtual source
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut row_of_col = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        row_of_col[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = row_of_col[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[row_of_col[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if row_of_col[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            row_of_col[j0] = row_of_col[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut col_of_row = vec![0; n];
    for j in 1..=n {
        col_of_row[row_of_col[j] - 1] = j - 1;
    }
    col_of_row
}

/// Optimal matching of a rectangular count table. Returns the matched total and, for every
/// row, its column (or `None` when the row is left unmatched).
pub fn max_matching(table: &[Vec<usize>]) -> (usize, Vec<Option<usize>>) {
    let rows = table.len();
    let cols = table.iter().map(Vec::len).max().unwrap_or(0);
    let n = rows.max(cols);
    if n == 0 {
        return (0, Vec::new());
    }
    let cell = |r: usize, c: usize| {
        table
            .get(r)
            .and_then(|row| row.get(c))
            .copied()
            .unwrap_or(0)
    };
    let top = (0..rows)
        .flat_map(|r| (0..cols).map(move |c| (r, c)))
        .map(|(r, c)| cell(r, c))
        .max()
        .unwrap_or(0) as f64;
    let cost: Vec<Vec<f64>> = (0..n)
        .map(|r| (0..n).map(|c| top - cell(r, c) as f64).collect())
        .collect();
    let assignment = hungarian_min(&cost);
    let mut total = 0;
    let mut mapping = vec![None; rows];
    for (r, slot) in mapping.iter_mut().enumerate() {
        let c = assignment[r];
        if c < cols {
            total += cell(r, c);
            *slot = Some(c);
        }
    }
    (total, mapping)
}

/// Number of points on which `predicted` agrees with `truth` under the best one-to-one
/// relabeling of predicted ids.
pub fn matched_count(predicted: &[usize], truth: &[usize]) -> Result<usize> {
    let table = contingency(predicted, truth)?;
    Ok(max_matching(&table).0)
}

/// Fraction of points matched under the optimal relabeling.
pub fn matched_accuracy(predicted: &[usize], truth: &[usize]) -> Result<f64> {
    if truth.is_empty() {
        return Err(Error::InvalidInput("accuracy of an empty labeling".into()));
    }
    Ok(matched_count(predicted, truth)? as f64 / truth.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn permutations(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![Vec::new()];
        }
        let mut out = Vec::new();
        for p in permutations(n - 1) {
            for pos in 0..=p.len() {
                let mut q = p.clone();
                q.insert(pos, n - 1);
                out.push(q);
            }
        }
        out
    }

    fn brute_matching(table: &[Vec<usize>]) -> usize {
        let rows = table.len();
        let cols = table.iter().map(Vec::len).max().unwrap_or(0);
        let n = rows.max(cols);
        let cell = |r: usize, c: usize| {
            table
                .get(r)
                .and_then(|row| row.get(c))
                .copied()
                .unwrap_or(0)
        };
        permutations(n)
            .iter()
            .map(|p| (0..n).map(|r| cell(r, p[r])).sum::<usize>())
            .max()
            .unwrap_or(0)
    }

    #[test]
    fn identical_up_to_permutation_is_perfect() {
        let truth = [0, 0, 1, 1, 2, 2];
        let pred = [2, 2, 0, 0, 1, 1];
        assert_eq!(matched_accuracy(&pred, &truth).unwrap(), 1.0);
    }

    #[test]
    fn single_cluster_on_balanced_classes() {
        let truth: Vec<usize> = (0..150).map(|i| i / 50).collect();
        let pred = vec![0; 150];
        let acc = matched_accuracy(&pred, &truth).unwrap();
        assert!((acc - 50.0 / 150.0).abs() < 1e-15);
    }

    #[test]
    fn rectangular_tables() {
        assert_eq!(max_matching(&[vec![3, 1], vec![2, 2], vec![0, 4]]).0, 7);
        assert_eq!(max_matching(&[vec![3, 1, 5]]).0, 5);
        let (total, map) = max_matching(&[vec![0, 9], vec![8, 1]]);
        assert_eq!(total, 17);
        assert_eq!(map, vec![Some(1), Some(0)]);
    }

    #[test]
    fn length_mismatch_rejected() {
        assert!(contingency(&[0, 1], &[0]).is_err());
        assert!(matched_accuracy(&[], &[]).is_err());
    }

    proptest! {
        #[test]
        fn hungarian_matches_brute_force(
            rows in 1usize..6,
            cols in 1usize..6,
            seed in prop::collection::vec(0usize..30, 36),
        ) {
            let table: Vec<Vec<usize>> = (0..rows)
                .map(|r| (0..cols).map(|c| seed[r * 6 + c]).collect())
                .collect();
            prop_assert_eq!(max_matching(&table).0, brute_matching(&table));
        }

        #[test]
        fn accuracy_invariant_under_relabeling(
            labels in prop::collection::vec((0usize..4, 0usize..3), 1..80),
            perm_idx in 0usize..24,
        ) {
            let pred: Vec<usize> = labels.iter().map(|l| l.0).collect();
            let truth: Vec<usize> = labels.iter().map(|l| l.1).collect();
            let perm = &permutations(4)[perm_idx];
            let relabeled: Vec<usize> = pred.iter().map(|&p| perm[p]).collect();
            let a = matched_accuracy(&pred, &truth).unwrap();
            let b = matched_accuracy(&relabeled, &truth).unwrap();
            prop_assert_eq!(a, b);
            prop_assert!(a >= 1.0 / truth.len() as f64 && a <= 1.0);
        }
    }
}

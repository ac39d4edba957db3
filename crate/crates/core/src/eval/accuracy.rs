use super::{ClusterAssignment, EvalError};
use crate::graph::LabelMap;

/// Maximum-weight perfect matching on a square matrix (Hungarian method with potentials,
/// O(n³)). Returns the total weight and, for each row, its matched column.
pub fn max_weight_matching(weights: &[Vec<i64>]) -> (i64, Vec<usize>) {
    let n = weights.len();
    if n == 0 {
        return (0, Vec::new());
    }
    assert!(
        weights.iter().all(|r| r.len() == n),
        "matrix must be square"
    );
    let max = weights.iter().flatten().copied().max().unwrap_or(0);
    // minimize max - w, 1-based arrays with a virtual column 0
    let cost = |i: usize, j: usize| max - weights[i - 1][j - 1];
    let inf = i64::MAX / 4;
    let mut u = vec![0i64; n + 1];
    let mut v = vec![0i64; n + 1];
    let mut row_of = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        row_of[0] = i;
        let mut j0 = 0;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = row_of[j0];
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost(i0, j) - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[row_of[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if row_of[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            row_of[j0] = row_of[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut col_of = vec![0usize; n];
    for j in 1..=n {
        col_of[row_of[j] - 1] = j - 1;
    }
    let total = col_of.iter().enumerate().map(|(i, &j)| weights[i][j]).sum();
    (total, col_of)
}

/// Fraction of nodes whose cluster maps to their label under the best cluster-to-label
/// bijection.
pub fn accuracy(clusters: &ClusterAssignment, labels: &LabelMap) -> Result<f64, EvalError> {
    if clusters.k != labels.k() {
        return Err(EvalError::ClusterCountMismatch {
            clusters: clusters.k,
            labels: labels.k(),
        });
    }
    if clusters.assignment.len() != labels.labels().len() {
        return Err(EvalError::SizeMismatch {
            assigned: clusters.assignment.len(),
            labeled: labels.labels().len(),
        });
    }
    let k = clusters.k;
    let mut table = vec![vec![0i64; k]; k];
    for (u, &c) in clusters.assignment.iter().enumerate() {
        let l = labels.label(u).ok_or(EvalError::Unlabeled(u))?;
        table[c][l] += 1;
    }
    let (matched, _) = max_weight_matching(&table);
    Ok(matched as f64 / clusters.assignment.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn clusters(assignment: Vec<usize>, k: usize) -> ClusterAssignment {
        ClusterAssignment {
            assignment,
            k,
            inertia: 0.0,
        }
    }

    fn labels(ids: &[usize]) -> LabelMap {
        LabelMap::from_assignments(&ids.iter().map(|&l| Some(l)).collect::<Vec<_>>())
    }

    #[test]
    fn relabeling_is_free() {
        let acc = accuracy(&clusters(vec![0, 0, 1, 1], 2), &labels(&[1, 1, 0, 0])).unwrap();
        assert_eq!(acc, 1.0);
    }

    #[test]
    fn half_correct() {
        let acc = accuracy(&clusters(vec![0, 1, 0, 1], 2), &labels(&[0, 0, 1, 1])).unwrap();
        assert_eq!(acc, 0.5);
    }

    #[test]
    fn ground_truth_against_itself() {
        let truth = [3, 1, 4, 1, 5, 9, 2, 6, 5, 3, 5];
        let map = labels(&truth);
        let own: Vec<usize> = map.labels().iter().map(|l| l.unwrap()).collect();
        assert_eq!(accuracy(&clusters(own, map.k()), &map).unwrap(), 1.0);
    }

    #[test]
    fn k_mismatch_errors() {
        assert!(matches!(
            accuracy(&clusters(vec![0, 1, 2], 3), &labels(&[0, 0, 1])),
            Err(EvalError::ClusterCountMismatch { .. })
        ));
    }

    #[test]
    fn unlabeled_node_errors() {
        let map = LabelMap::from_assignments(&[Some(0), None, Some(1)]);
        assert_eq!(
            accuracy(&clusters(vec![0, 1, 1], 2), &map),
            Err(EvalError::Unlabeled(1))
        );
    }

    #[test]
    fn matching_small_cases() {
        assert_eq!(max_weight_matching(&[vec![5]]).0, 5);
        let (w, cols) = max_weight_matching(&[vec![1, 9], vec![8, 2]]);
        assert_eq!(w, 17);
        assert_eq!(cols, vec![1, 0]);
    }
}

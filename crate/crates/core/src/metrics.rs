//! External clustering metrics: ACC, ARI, pairwise F-score, NMI and purity.
//!
//! | Metric | Range | Notes |
//! |--------|-------|-------|
//! | [`accuracy`] | [0, 1] | best one-to-one cluster/class matching (Hungarian) |
//! | [`ari`] | [-1, 1] | adjusted-for-chance Rand index |
//! | [`f_score_pairs`] | [0, 1] | harmonic mean of pairwise precision and recall |
//! | [`nmi`] | [0, 1] | mutual information over the geometric mean of entropies |
//! | [`purity`] | [0, 1] | majority class per cluster |

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// True classes (rows) against predicted clusters (columns).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContingencyTable {
    pub counts: Vec<Vec<u64>>,
    pub row_sums: Vec<u64>,
    pub col_sums: Vec<u64>,
    pub total: u64,
}

impl ContingencyTable {
    /// Ids may be arbitrary; they are compacted in ascending order.
    pub fn new(pred: &[usize], truth: &[usize]) -> Result<Self> {
        if pred.len() != truth.len() {
            return Err(Error::Size(format!("{} predictions for {} labels", pred.len(), truth.len())));
        }
        let compact = |xs: &[usize]| -> (Vec<usize>, usize) {
            let ids: BTreeMap<usize, usize> = xs.iter().map(|&x| (x, 0)).collect();
            let ids: BTreeMap<usize, usize> = ids.keys().enumerate().map(|(i, &k)| (k, i)).collect();
            (xs.iter().map(|x| ids[x]).collect(), ids.len())
        };
        let (p, ns) = compact(pred);
        let (t, nr) = compact(truth);
        let mut counts = vec![vec![0u64; ns]; nr];
        for (&ti, &pi) in t.iter().zip(&p) {
            counts[ti][pi] += 1;
        }
        let row_sums = counts.iter().map(|r| r.iter().sum()).collect();
        let col_sums = (0..ns).map(|j| counts.iter().map(|r| r[j]).sum()).collect();
        Ok(Self { counts, row_sums, col_sums, total: pred.len() as u64 })
    }

    pub fn n_classes(&self) -> usize {
        self.counts.len()
    }

    pub fn n_clusters(&self) -> usize {
        self.col_sums.len()
    }
}

/// Pair counts over all unordered sample pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PairCounts {
    /// Same cluster and same class.
    pub same_same: u64,
    /// Same cluster, different class.
    pub same_pred_only: u64,
    /// Different cluster, same class.
    pub same_truth_only: u64,
    /// Different in both.
    pub diff_diff: u64,
}

fn choose2(n: u64) -> u64 {
    n * n.saturating_sub(1) / 2
}

impl PairCounts {
    pub fn from_table(t: &ContingencyTable) -> Self {
        let same_same: u64 = t.counts.iter().flatten().map(|&n| choose2(n)).sum();
        let pred_pairs: u64 = t.col_sums.iter().map(|&n| choose2(n)).sum();
        let truth_pairs: u64 = t.row_sums.iter().map(|&n| choose2(n)).sum();
        let all = choose2(t.total);
        Self {
            same_same,
            same_pred_only: pred_pairs - same_same,
            same_truth_only: truth_pairs - same_same,
            diff_diff: all + same_same - pred_pairs - truth_pairs,
        }
    }

    /// `2 (ad - bc) / ((a + b)(b + d) + (a + c)(c + d))`; 1 when both
    /// partitions are trivial in the same way (zero denominator).
    pub fn ari(&self) -> f64 {
        let (a, b, c, d) = (
            self.same_same as f64,
            self.same_pred_only as f64,
            self.same_truth_only as f64,
            self.diff_diff as f64,
        );
        let denom = (a + b) * (b + d) + (a + c) * (c + d);
        if denom == 0.0 {
            return 1.0;
        }
        2.0 * (a * d - b * c) / denom
    }

    /// Pairwise F1; 0 when either precision or recall is undefined.
    pub fn f_score(&self) -> f64 {
        let tp = self.same_same as f64;
        let pred = tp + self.same_pred_only as f64;
        let truth = tp + self.same_truth_only as f64;
        if pred == 0.0 || truth == 0.0 || tp == 0.0 {
            return 0.0;
        }
        let precision = tp / pred;
        let recall = tp / truth;
        2.0 * precision * recall / (precision + recall)
    }
}

/// Minimum-cost perfect matching on a square cost matrix.
///
/// Returns `assignment[row] = col` and the total cost. O(n^3) shortest
/// augmenting path with potentials.
pub fn hungarian(cost: &[Vec<f64>]) -> Result<(Vec<usize>, f64)> {
    let n = cost.len();
    if cost.iter().any(|r| r.len() != n) {
        return Err(Error::Size("hungarian needs a square cost matrix".into()));
    }
    if cost.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::Domain("hungarian needs finite costs".into()));
    }
    if n == 0 {
        return Ok((Vec::new(), 0.0));
    }
    // 1-based arrays; column 0 is a virtual start
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut way = vec![0usize; n + 1];
    let mut col_row = vec![0usize; n + 1];
    for row in 1..=n {
        col_row[0] = row;
        let mut j0 = 0usize;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = col_row[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
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
                    u[col_row[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if col_row[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            col_row[j0] = col_row[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assignment = vec![0usize; n];
    for j in 1..=n {
        assignment[col_row[j] - 1] = j - 1;
    }
    let total = assignment.iter().enumerate().map(|(r, &c)| cost[r][c]).sum();
    Ok((assignment, total))
}

/// Fraction of samples correctly labelled under the best one-to-one
/// cluster-to-class matching.
pub fn accuracy(pred: &[usize], truth: &[usize]) -> Result<f64> {
    let t = ContingencyTable::new(pred, truth)?;
    if t.total == 0 {
        return Ok(0.0);
    }
    let n = t.n_classes().max(t.n_clusters());
    let cost: Vec<Vec<f64>> = (0..n)
        .map(|r| (0..n).map(|c| -(t.counts.get(r).and_then(|row| row.get(c)).copied().unwrap_or(0) as f64)).collect())
        .collect();
    let (_, total) = hungarian(&cost)?;
    Ok(-total / t.total as f64)
}

pub fn ari(pred: &[usize], truth: &[usize]) -> Result<f64> {
    Ok(PairCounts::from_table(&ContingencyTable::new(pred, truth)?).ari())
}

pub fn f_score_pairs(pred: &[usize], truth: &[usize]) -> Result<f64> {
    Ok(PairCounts::from_table(&ContingencyTable::new(pred, truth)?).f_score())
}

/// `I(P; T) / sqrt(H(P) H(T))` with natural logs; 0 when either entropy is 0.
pub fn nmi(pred: &[usize], truth: &[usize]) -> Result<f64> {
    let t = ContingencyTable::new(pred, truth)?;
    let n = t.total as f64;
    if t.total == 0 {
        return Ok(0.0);
    }
    let entropy = |sums: &[u64]| -> f64 {
        sums.iter()
            .filter(|&&s| s > 0)
            .map(|&s| {
                let p = s as f64 / n;
                -p * p.ln()
            })
            .sum()
    };
    let h_truth = entropy(&t.row_sums);
    let h_pred = entropy(&t.col_sums);
    if h_truth <= 0.0 || h_pred <= 0.0 {
        return Ok(0.0);
    }
    let mut mi = 0.0;
    for (r, row) in t.counts.iter().enumerate() {
        for (c, &nij) in row.iter().enumerate() {
            if nij == 0 {
                continue;
            }
            let nij = nij as f64;
            mi += nij / n * (n * nij / (t.row_sums[r] as f64 * t.col_sums[c] as f64)).ln();
        }
    }
    Ok((mi / (h_truth * h_pred).sqrt()).clamp(0.0, 1.0))
}

/// Σ over clusters of the majority class count, over m.
pub fn purity(pred: &[usize], truth: &[usize]) -> Result<f64> {
    let t = ContingencyTable::new(pred, truth)?;
    if t.total == 0 {
        return Ok(0.0);
    }
    let hits: u64 = (0..t.n_clusters()).map(|c| t.counts.iter().map(|r| r[c]).max().unwrap_or(0)).sum();
    Ok(hits as f64 / t.total as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricSet {
    pub acc: f64,
    pub ari: f64,
    pub f_score: f64,
    pub nmi: f64,
    pub purity: f64,
}

impl MetricSet {
    pub const NAMES: [&'static str; 5] = ["acc", "ari", "f_score", "nmi", "purity"];

    pub fn compute(pred: &[usize], truth: &[usize]) -> Result<Self> {
        Ok(Self {
            acc: accuracy(pred, truth)?,
            ari: ari(pred, truth)?,
            f_score: f_score_pairs(pred, truth)?,
            nmi: nmi(pred, truth)?,
            purity: purity(pred, truth)?,
        })
    }

    pub fn values(&self) -> [f64; 5] {
        [self.acc, self.ari, self.f_score, self.nmi, self.purity]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hungarian_examples() {
        let zero_diag = vec![vec![0.0, 1.0, 1.0], vec![1.0, 0.0, 1.0], vec![1.0, 1.0, 0.0]];
        assert_eq!(hungarian(&zero_diag).unwrap(), (vec![0, 1, 2], 0.0));
        assert_eq!(hungarian(&[vec![4.0, 1.0], vec![2.0, 3.0]]).unwrap(), (vec![1, 0], 3.0));
        assert!(matches!(hungarian(&[vec![1.0, 2.0]]), Err(Error::Size(_))));
    }

    #[test]
    fn accuracy_examples() {
        assert_eq!(accuracy(&[0, 0, 1, 1], &[0, 0, 1, 1]).unwrap(), 1.0);
        assert_eq!(accuracy(&[1, 1, 0, 0], &[0, 0, 1, 1]).unwrap(), 1.0);
        assert_eq!(accuracy(&[0, 1, 0, 1], &[0, 0, 1, 1]).unwrap(), 0.5);
        assert!(matches!(accuracy(&[0, 1], &[0]), Err(Error::Size(_))));
    }

    #[test]
    fn perfect_agreement() {
        let l = [0, 0, 1, 1, 2, 2];
        let m = MetricSet::compute(&[5, 5, 3, 3, 9, 9], &l).unwrap();
        assert_eq!(m.values(), [1.0; 5]);
    }

    #[test]
    fn singleton_clusters() {
        let truth = [0, 0, 1, 1];
        let pred = [0, 1, 2, 3];
        assert_eq!(purity(&pred, &truth).unwrap(), 1.0);
        assert_eq!(f_score_pairs(&pred, &truth).unwrap(), 0.0);
    }

    #[test]
    fn ari_hand_counted() {
        let truth = [0, 0, 0, 1, 1, 1];
        let pred = [0, 0, 1, 1, 2, 2];
        let pc = PairCounts::from_table(&ContingencyTable::new(&pred, &truth).unwrap());
        // same-same: (0,1) and (4,5)
        assert_eq!(pc.same_same, 2);
        assert_eq!(pc.same_pred_only, 1);
        assert_eq!(pc.same_truth_only, 4);
        assert_eq!(pc.diff_diff, 8);
        let expected = 2.0 * (2.0 * 8.0 - 1.0 * 4.0) / ((3.0 * 9.0) + (6.0 * 12.0));
        assert_eq!(ari(&pred, &truth).unwrap(), expected);
    }

    #[test]
    fn nmi_single_class_is_zero() {
        assert_eq!(nmi(&[0, 0, 0], &[0, 0, 0]).unwrap(), 0.0);
        assert_eq!(nmi(&[0, 1, 0], &[0, 0, 0]).unwrap(), 0.0);
    }

    #[test]
    fn unequal_cluster_and_class_counts() {
        // three clusters over two classes: best matching keeps 4 of 5
        let acc = accuracy(&[0, 0, 1, 1, 2], &[0, 0, 1, 1, 1]).unwrap();
        assert!((acc - 0.8).abs() < 1e-15);
    }
}

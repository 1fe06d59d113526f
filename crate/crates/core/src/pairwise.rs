//! Euclidean distances, the Gaussian-kernel pairwise similarity and
//! symmetrized k-nearest-neighbor sets.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::dataset::Dataset;
use crate::error::{Error, Result};

/// Dense symmetric matrix of pairwise Euclidean distances, zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix(DMatrix<f64>);

impl DistanceMatrix {
    /// Wraps a precomputed matrix after checking symmetry, zero diagonal and
    /// nonnegativity.
    pub fn from_dense(d: DMatrix<f64>) -> Result<Self> {
        let m = d.nrows();
        if d.ncols() != m {
            return Err(Error::Size(format!("distance matrix must be square, got {:?}", d.shape())));
        }
        for i in 0..m {
            if d[(i, i)] != 0.0 {
                return Err(Error::Domain(format!("nonzero diagonal at {i}")));
            }
            for j in 0..i {
                let v = d[(i, j)];
                if !v.is_finite() || v < 0.0 || v != d[(j, i)] {
                    return Err(Error::Domain(format!("invalid or asymmetric distance at ({i}, {j})")));
                }
            }
        }
        Ok(Self(d))
    }

    pub fn len(&self) -> usize {
        self.0.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.0.nrows() == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    /// Multiplies every distance by `alpha`.
    pub fn scaled(&self, alpha: f64) -> Self {
        Self(&self.0 * alpha)
    }
}

/// Dense symmetric affinity matrix with entries in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix(DMatrix<f64>);

impl SimilarityMatrix {
    /// Wraps a square matrix, checking symmetry (1e-12) and the `[0, 1]` range.
    pub fn from_dense(s: DMatrix<f64>) -> Result<Self> {
        let m = s.nrows();
        if s.ncols() != m {
            return Err(Error::Size(format!("similarity must be square, got {:?}", s.shape())));
        }
        for i in 0..m {
            for j in 0..=i {
                let v = s[(i, j)];
                if !(0.0..=1.0).contains(&v) {
                    return Err(Error::Domain(format!("similarity {v} at ({i}, {j}) outside [0, 1]")));
                }
                if (v - s[(j, i)]).abs() > 1e-12 {
                    return Err(Error::Domain(format!("similarity not symmetric at ({i}, {j})")));
                }
            }
        }
        Ok(Self(s))
    }

    /// Wraps without validation; callers guarantee the invariants.
    pub(crate) fn from_dense_unchecked(s: DMatrix<f64>) -> Self {
        Self(s)
    }

    pub fn len(&self) -> usize {
        self.0.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.0.nrows() == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }
}

/// Euclidean distances; each unordered pair is computed once and mirrored.
pub fn pairwise_distances(d: &Dataset) -> DistanceMatrix {
    let m = d.n_samples();
    // row-major copy so each sample is contiguous
    let rows: Vec<Vec<f64>> = (0..m).map(|i| d.samples.row(i).iter().copied().collect()).collect();
    let upper: Vec<Vec<f64>> = (0..m)
        .into_par_iter()
        .map(|i| {
            (i + 1..m)
                .map(|j| {
                    rows[i]
                        .iter()
                        .zip(&rows[j])
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum::<f64>()
                        .sqrt()
                })
                .collect()
        })
        .collect();
    let mut out = DMatrix::zeros(m, m);
    for (i, row) in upper.iter().enumerate() {
        for (off, &v) in row.iter().enumerate() {
            let j = i + 1 + off;
            out[(i, j)] = v;
            out[(j, i)] = v;
        }
    }
    DistanceMatrix(out)
}

/// `s[i,j] = exp(-d[i,j]^2 / (2 sigma^2))`, diagonal exactly 1.
pub fn gaussian_similarity(dist: &DistanceMatrix, sigma_s: f64) -> Result<SimilarityMatrix> {
    if !(sigma_s > 0.0 && sigma_s.is_finite()) {
        return Err(Error::Parameter(format!("kernel bandwidth must be positive, got {sigma_s}")));
    }
    let m = dist.len();
    let denom = 2.0 * sigma_s * sigma_s;
    let mut s = DMatrix::from_element(m, m, 1.0);
    for i in 0..m {
        for j in i + 1..m {
            let d = dist.get(i, j);
            let v = (-(d * d) / denom).exp();
            s[(i, j)] = v;
            s[(j, i)] = v;
        }
    }
    Ok(SimilarityMatrix(s))
}

/// Median of the off-diagonal upper-triangle distances, or 1 when that
/// median is 0.
pub fn median_bandwidth(dist: &DistanceMatrix) -> f64 {
    let m = dist.len();
    let mut vals: Vec<f64> = (0..m).flat_map(|i| (i + 1..m).map(move |j| (i, j))).map(|(i, j)| dist.get(i, j)).collect();
    if vals.is_empty() {
        return 1.0;
    }
    vals.sort_by(f64::total_cmp);
    let n = vals.len();
    let med = if n % 2 == 1 { vals[n / 2] } else { 0.5 * (vals[n / 2 - 1] + vals[n / 2]) };
    if med > 0.0 {
        med
    } else {
        1.0
    }
}

/// Symmetrized, self-inclusive neighbor sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NeighborSets {
    /// Sorted ascending, always contains the sample itself.
    pub nbrs: Vec<Vec<usize>>,
    pub k: usize,
}

impl NeighborSets {
    pub fn len(&self) -> usize {
        self.nbrs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nbrs.is_empty()
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.nbrs[i].binary_search(&j).is_ok()
    }

    pub fn total_size(&self) -> usize {
        self.nbrs.iter().map(Vec::len).sum()
    }
}

/// The k nearest other samples of `i`, ties broken by ascending index.
pub fn raw_knn(dist: &DistanceMatrix, i: usize, k: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..dist.len()).filter(|&j| j != i).collect();
    order.sort_by(|&a, &b| dist.get(i, a).total_cmp(&dist.get(i, b)).then(a.cmp(&b)));
    order.truncate(k);
    order
}

/// `N̄(i) = N(i) ∪ {j : i ∈ N(j)} ∪ {i}` where `N(i)` is the raw kNN set.
pub fn knn_sets(dist: &DistanceMatrix, k: usize) -> Result<NeighborSets> {
    let m = dist.len();
    if k < 1 || k + 1 > m {
        return Err(Error::Parameter(format!("neighbor count {k} outside 1..={}", m.saturating_sub(1))));
    }
    let raw: Vec<Vec<usize>> = (0..m).into_par_iter().map(|i| raw_knn(dist, i, k)).collect();
    let mut nbrs: Vec<Vec<usize>> = (0..m).map(|i| vec![i]).collect();
    for (i, list) in raw.iter().enumerate() {
        for &j in list {
            nbrs[i].push(j);
            nbrs[j].push(i);
        }
    }
    for list in &mut nbrs {
        list.sort_unstable();
        list.dedup();
    }
    Ok(NeighborSets { nbrs, k })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ds(rows: &[&[f64]]) -> Dataset {
        let n = rows[0].len();
        let flat: Vec<f64> = rows.iter().flat_map(|r| r.iter().copied()).collect();
        Dataset::new(DMatrix::from_row_slice(rows.len(), n, &flat), None, "t").unwrap()
    }

    #[test]
    fn three_four_five() {
        let d = pairwise_distances(&ds(&[&[0.0, 0.0], &[3.0, 4.0]]));
        assert_eq!(d.get(0, 1), 5.0);
        assert_eq!(d.get(1, 0), 5.0);
        assert_eq!(d.get(0, 0), 0.0);
    }

    #[test]
    fn coincident_samples_have_zero_distance() {
        let d = pairwise_distances(&ds(&[&[1.5, -2.0], &[1.5, -2.0], &[0.0, 0.0]]));
        assert_eq!(d.get(0, 1), 0.0);
    }

    #[test]
    fn kernel_closed_forms() {
        let sigma = 0.7;
        let dm = DMatrix::from_row_slice(2, 2, &[0.0, sigma * 2f64.sqrt(), sigma * 2f64.sqrt(), 0.0]);
        let s = gaussian_similarity(&DistanceMatrix::from_dense(dm).unwrap(), sigma).unwrap();
        assert_eq!(s.get(0, 0), 1.0);
        assert!((s.get(0, 1) - (-1f64).exp()).abs() < 1e-15);
        assert!((s.get(0, 1) - 0.367879).abs() < 1e-6);
    }

    #[test]
    fn nonpositive_bandwidth_is_rejected() {
        let d = pairwise_distances(&ds(&[&[0.0], &[1.0]]));
        assert!(matches!(gaussian_similarity(&d, 0.0), Err(Error::Parameter(_))));
        assert!(matches!(gaussian_similarity(&d, -1.0), Err(Error::Parameter(_))));
    }

    #[test]
    fn median_rules() {
        // 1-D points 0,1,3: distances {1,3,2}
        assert_eq!(median_bandwidth(&pairwise_distances(&ds(&[&[0.0], &[1.0], &[3.0]]))), 2.0);
        let dm = DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 3.0, 1.0, 0.0, 3.0, 3.0, 3.0, 0.0]);
        // distances {1,3,3} -> 3
        assert_eq!(median_bandwidth(&DistanceMatrix::from_dense(dm).unwrap()), 3.0);
        let dm = DMatrix::from_row_slice(4, 4, &[
            0.0, 1.0, 1.0, 3.0, //
            1.0, 0.0, 3.0, 3.0, //
            1.0, 3.0, 0.0, 1.0, //
            3.0, 3.0, 1.0, 0.0,
        ]);
        // {1,1,3,3,3,1} -> even count midpoint of 1 and 3
        assert_eq!(median_bandwidth(&DistanceMatrix::from_dense(dm).unwrap()), 2.0);
        assert_eq!(median_bandwidth(&pairwise_distances(&ds(&[&[2.0], &[2.0], &[2.0]]))), 1.0);
    }

    #[test]
    fn knn_hand_enumeration() {
        let d = pairwise_distances(&ds(&[&[0.0], &[1.0], &[10.0]]));
        let n = knn_sets(&d, 1).unwrap();
        assert_eq!(n.nbrs, vec![vec![0, 1], vec![0, 1, 2], vec![1, 2]]);
    }

    #[test]
    fn knn_full_graph_and_range() {
        let d = pairwise_distances(&ds(&[&[0.0], &[1.0], &[10.0], &[4.0]]));
        let n = knn_sets(&d, 3).unwrap();
        assert!(n.nbrs.iter().all(|l| l == &vec![0, 1, 2, 3]));
        assert!(knn_sets(&d, 0).is_err());
        assert!(knn_sets(&d, 4).is_err());
    }

    #[test]
    fn knn_ties_prefer_lower_index() {
        // sample 1 is equidistant from 0 and 2
        let d = pairwise_distances(&ds(&[&[0.0], &[1.0], &[2.0], &[50.0]]));
        assert_eq!(raw_knn(&d, 1, 1), vec![0]);
        assert_eq!(raw_knn(&d, 1, 2), vec![0, 2]);
    }
}

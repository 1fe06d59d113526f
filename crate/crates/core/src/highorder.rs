//! High-order similarity: eigenvectors of the unfolded tensor's normalized
//! affinity are folded back to `m x m`, sign-fixed, symmetrized, averaged
//! and min-max scaled to `[0, 1]`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::pairwise::SimilarityMatrix;
use crate::sparse::SparseSymMatrix;
use crate::spectral::{degree_vector, EigenPairs};
use crate::tensorsim::pair_index;

/// Range below which a folded average counts as constant.
pub const CONSTANT_RANGE: f64 = 1e-12;

/// Eigenvalues closer than this are treated as one repeated eigenvalue.
pub const REPEATED_EIGENVALUE_GAP: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct HighOrderSimilarity {
    pub v: SimilarityMatrix,
    /// The averaged fold was constant and has been replaced by zeros.
    pub degenerate: bool,
}

/// `V[i, j] = v_hat[unfold(i, j)]`.
pub fn fold_eigenvector(v_hat: &[f64], m: usize) -> Result<DMatrix<f64>> {
    if v_hat.len() != m * m {
        return Err(Error::Size(format!("vector of length {} cannot fold to {m} x {m}", v_hat.len())));
    }
    Ok(DMatrix::from_fn(m, m, |i, j| v_hat[pair_index(i, j, m)]))
}

/// Inverse of [`fold_eigenvector`].
pub fn flatten(v: &DMatrix<f64>) -> Vec<f64> {
    let m = v.nrows();
    let mut out = vec![0.0; m * m];
    for j in 0..m {
        for i in 0..m {
            out[pair_index(i, j, m)] = v[(i, j)];
        }
    }
    out
}

/// Negates the matrix if its largest-magnitude entry (first in row-major
/// order on ties) is negative, then returns `(V + Vᵀ) / 2`.
pub fn canonicalize(vi: &DMatrix<f64>) -> DMatrix<f64> {
    let (rows, cols) = vi.shape();
    let mut best = (0usize, 0usize);
    let mut best_abs = f64::NEG_INFINITY;
    for r in 0..rows {
        for c in 0..cols {
            let a = vi[(r, c)].abs();
            if a > best_abs {
                best_abs = a;
                best = (r, c);
            }
        }
    }
    let signed = if rows > 0 && vi[best] < 0.0 { -vi } else { vi.clone() };
    (&signed + signed.transpose()) * 0.5
}

/// Orthogonal basis of the eigenvalue-1 eigenspace of the normalized
/// unfolded tensor `D^{-1/2} T D^{-1/2}`: one vector `D^{1/2} 1_C` per
/// connected component `C` of the pair graph with positive volume.
///
/// Components holding self pairs `(i, i)` come first, then larger volume,
/// then smaller first pair index. With a connected pair graph this is the
/// single vector `D^{1/2} 1`.
pub fn leading_eigenbasis(t: &SparseSymMatrix, m: usize) -> Result<Vec<Vec<f64>>> {
    if t.dim() != m * m {
        return Err(Error::Size(format!("tensor of dimension {} does not unfold {m} samples", t.dim())));
    }
    let deg = degree_vector(t)?;
    let (comp, count) = t.connected_components();
    let mut volume = vec![0.0; count];
    let mut has_self = vec![false; count];
    for (r, &id) in comp.iter().enumerate() {
        volume[id] += deg[r];
    }
    for i in 0..m {
        has_self[comp[pair_index(i, i, m)]] = true;
    }
    // ids already follow the smallest member index
    let mut order: Vec<usize> = (0..count).filter(|&id| volume[id] > 0.0).collect();
    order.sort_by(|&a, &b| has_self[b].cmp(&has_self[a]).then(volume[b].total_cmp(&volume[a])).then(a.cmp(&b)));
    Ok(order
        .into_iter()
        .map(|id| comp.iter().zip(&deg).map(|(&c, &d)| if c == id { d.sqrt() } else { 0.0 }).collect())
        .collect())
}

/// Indices among the first `c` of `values` (descending) whose eigenvectors
/// are determined up to sign: the first `fixed`, which the caller chose
/// explicitly, and every eigenvalue at least [`REPEATED_EIGENVALUE_GAP`]
/// away from its neighbours in `values`. Pass `c + 1` values so a repeat
/// across the `c` boundary is visible.
pub fn determined_indices(values: &[f64], c: usize, fixed: usize) -> Vec<usize> {
    let simple = |i: usize| {
        let below = i + 1 >= values.len() || values[i] - values[i + 1] >= REPEATED_EIGENVALUE_GAP;
        let above = i == 0 || values[i - 1] - values[i] >= REPEATED_EIGENVALUE_GAP;
        below && above
    };
    (0..c.min(values.len())).filter(|&i| i < fixed || simple(i)).collect()
}

/// Average of the canonicalized folds of the first `c` eigenvectors,
/// min-max scaled to `[0, 1]`.
pub fn high_order_similarity(pairs: &EigenPairs, m: usize, c: usize) -> Result<HighOrderSimilarity> {
    if c < 1 || pairs.vectors.len() < c {
        return Err(Error::Size(format!("need {c} eigenvectors, have {}", pairs.vectors.len())));
    }
    let mut acc = DMatrix::<f64>::zeros(m, m);
    for v_hat in pairs.vectors.iter().take(c) {
        acc += canonicalize(&fold_eigenvector(v_hat, m)?);
    }
    acc /= c as f64;

    let lo = acc.min();
    let hi = acc.max();
    let range = hi - lo;
    // also catches a NaN range
    if range.partial_cmp(&(CONSTANT_RANGE * hi.abs().max(lo.abs()).max(f64::MIN_POSITIVE))) != Some(std::cmp::Ordering::Greater) {
        return Ok(HighOrderSimilarity {
            v: SimilarityMatrix::from_dense_unchecked(DMatrix::zeros(m, m)),
            degenerate: true,
        });
    }
    let mut v = acc.map(|x| ((x - lo) / range).clamp(0.0, 1.0));
    // exact symmetry after rounding
    for i in 0..m {
        for j in 0..i {
            v[(j, i)] = v[(i, j)];
        }
    }
    Ok(HighOrderSimilarity { v: SimilarityMatrix::from_dense_unchecked(v), degenerate: false })
}

//! Fourth-order pair-to-pair similarity in unfolded `m^2 x m^2` form.
//!
//! Entry `T[i,j,k,l]` scores pair `(x_i, x_k)` against pair `(x_j, x_l)` and
//! lands in the unfolded matrix at row `unfold(i, j)`, column `unfold(k, l)`.
//!
//! Two tensors are provided: the decomposable product form
//! `T = S[i,k] * S[j,l]`, whose unfolding is the Kronecker product `S ⊗ S`
//! and which serves as a verification fixture, and the distance-ratio form
//!
//! ```text
//! T[i,j,k,l] = exp(-sigma * (d_ij + d_kl) / (d_ik + d_jl + eps))
//! ```
//!
//! used by the clustering pipelines, stored sparsely on the pattern
//! `k ∈ N̄(i), l ∈ N̄(j)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pairwise::{DistanceMatrix, NeighborSets, SimilarityMatrix};
pub use crate::sparse::SparseSymMatrix;

/// Largest `m` accepted by [`decomposable_unfolded`] by default.
pub const DENSE_VERIFICATION_CAP: usize = 32;

/// 1-based flat index `r = m(j-1) + i` of the pair `(i, j)`.
pub fn unfold_index(i: usize, j: usize, m: usize) -> Result<usize> {
    if i < 1 || j < 1 || i > m || j > m {
        return Err(Error::Index(format!("pair ({i}, {j}) outside 1..={m}")));
    }
    Ok(m * (j - 1) + i)
}

/// Inverse of [`unfold_index`].
pub fn fold_index(r: usize, m: usize) -> Result<(usize, usize)> {
    if r < 1 || r > m * m {
        return Err(Error::Index(format!("flat index {r} outside 1..={}", m * m)));
    }
    Ok(((r - 1) % m + 1, (r - 1) / m + 1))
}

/// 0-based flat index of the pair `(i, j)`; same ordering as [`unfold_index`].
#[inline]
pub fn pair_index(i: usize, j: usize, m: usize) -> usize {
    j * m + i
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TensorParams {
    pub sigma_t: f64,
    pub eps: f64,
    pub k: usize,
}

impl Default for TensorParams {
    fn default() -> Self {
        Self { sigma_t: 1.0, eps: 1e-4, k: 10 }
    }
}

impl TensorParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma_t > 0.0 && self.sigma_t.is_finite()) {
            return Err(Error::Parameter(format!("sigma_t must be positive, got {}", self.sigma_t)));
        }
        if !(self.eps > 0.0 && self.eps < 1e-3) {
            return Err(Error::Parameter(format!("eps must lie in (0, 0.001), got {}", self.eps)));
        }
        if self.k < 1 {
            return Err(Error::Parameter("k must be at least 1".into()));
        }
        Ok(())
    }
}

/// Unfolding of `T[i,j,k,l] = S[i,k] * S[j,l]`, i.e. `S ⊗ S`.
///
/// Materializes all `m^4` entries, so it refuses `m > cap`.
pub fn decomposable_unfolded(s: &SimilarityMatrix, cap: usize) -> Result<SparseSymMatrix> {
    let m = s.len();
    if m > cap {
        return Err(Error::Size(format!("m = {m} exceeds the dense verification cap {cap}")));
    }
    let dim = m * m;
    let (mut rows, mut cols, mut vals) = (Vec::new(), Vec::new(), Vec::new());
    for j in 0..m {
        for i in 0..m {
            let r = pair_index(i, j, m);
            for l in 0..m {
                for k in 0..m {
                    let c = pair_index(k, l, m);
                    if c < r {
                        continue;
                    }
                    let v = s.get(i, k) * s.get(j, l);
                    if v != 0.0 {
                        rows.push(r as u32);
                        cols.push(c as u32);
                        vals.push(v);
                    }
                }
            }
        }
    }
    Ok(SparseSymMatrix::from_sorted_upper(dim, rows, cols, vals))
}

/// Distance-ratio tensor entry for 0-based sample indices.
#[inline]
pub fn indecomposable_entry(dist: &DistanceMatrix, i: usize, j: usize, k: usize, l: usize, p: &TensorParams) -> f64 {
    ratio_entry(dist.get(i, j), dist.get(k, l), dist.get(i, k), dist.get(j, l), p.sigma_t, p.eps)
}

/// `exp(-sigma (d_ij + d_kl) / (d_ik + d_jl + eps))` from the four distances.
#[inline]
pub fn ratio_entry(d_ij: f64, d_kl: f64, d_ik: f64, d_jl: f64, sigma: f64, eps: f64) -> f64 {
    (-sigma * (d_ij + d_kl) / (d_ik + d_jl + eps)).exp()
}

/// Sparse unfolded distance-ratio tensor on the pattern `k ∈ N̄(i)`,
/// `l ∈ N̄(j)`; everything else is a structural zero.
///
/// The pattern is closed under `(i,j) <-> (k,l)` because the neighbor sets
/// are symmetrized, so only the upper triangle is evaluated.
pub fn build_sparse_tensor(dist: &DistanceMatrix, nbrs: &NeighborSets, p: &TensorParams) -> Result<SparseSymMatrix> {
    p.validate()?;
    let m = dist.len();
    if nbrs.len() != m {
        return Err(Error::Size(format!("{} neighbor sets for {m} samples", nbrs.len())));
    }
    for (i, set) in nbrs.nbrs.iter().enumerate() {
        if !set.contains(&i) || set.iter().any(|&j| !nbrs.contains(j, i)) {
            return Err(Error::Parameter(format!("neighbor set of {i} is not symmetrized and self-inclusive")));
        }
    }
    if m * m > u32::MAX as usize {
        return Err(Error::Size(format!("m = {m} too large for u32 pair indexing")));
    }

    // One block per column-pair index j; within a block rows run over i, and
    // columns ascend because l is the slow index of pair_index(k, l).
    let blocks: Vec<(Vec<u32>, Vec<u32>, Vec<f64>)> = (0..m)
        .into_par_iter()
        .map(|j| {
            let (mut rows, mut cols, mut vals) = (Vec::new(), Vec::new(), Vec::new());
            for i in 0..m {
                let r = pair_index(i, j, m);
                let d_ij = dist.get(i, j);
                for &l in &nbrs.nbrs[j] {
                    let d_jl = dist.get(j, l);
                    for &k in &nbrs.nbrs[i] {
                        let c = pair_index(k, l, m);
                        if c < r {
                            continue;
                        }
                        let v = ratio_entry(d_ij, dist.get(k, l), dist.get(i, k), d_jl, p.sigma_t, p.eps);
                        rows.push(r as u32);
                        cols.push(c as u32);
                        vals.push(v);
                    }
                }
            }
            (rows, cols, vals)
        })
        .collect();

    let total: usize = blocks.iter().map(|b| b.0.len()).sum();
    let (mut rows, mut cols, mut vals) = (Vec::with_capacity(total), Vec::with_capacity(total), Vec::with_capacity(total));
    for (r, c, v) in blocks {
        rows.extend(r);
        cols.extend(c);
        vals.extend(v);
    }
    Ok(SparseSymMatrix::from_sorted_upper(m * m, rows, cols, vals))
}

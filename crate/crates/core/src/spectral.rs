//! Degrees, the normalized affinity `D^{-1/2} A D^{-1/2}` and top-`c`
//! eigenpairs of symmetric matrices.
//!
//! Small operators go through a dense symmetric solver. Larger ones use a
//! symmetric Krylov (Lanczos/Arnoldi) iteration with full
//! reorthogonalization and thick restarts, started from a seeded random
//! vector.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pairwise::SimilarityMatrix;
use crate::sparse::SparseSymMatrix;

/// Degrees below this are raised to it before taking `D^{-1/2}`.
pub const DEGREE_FLOOR: f64 = 1e-12;

/// Operators up to this dimension are solved densely by default.
pub const DEFAULT_DENSE_CAP: usize = 400;

/// Symmetric matrices the spectral routines accept.
pub trait SymmetricOperator {
    fn dim(&self) -> usize;
    /// `y = A x`
    fn apply(&self, x: &[f64], y: &mut [f64]);
    fn row_sums(&self) -> Vec<f64>;
    fn max_abs_row_sum(&self) -> f64;
    fn min_entry(&self) -> f64;
    fn to_dense(&self) -> DMatrix<f64>;
    /// Entry `(i, j)` divided by `sqrt(deg[i] * deg[j])`.
    fn divide_by_degrees(&self, deg: &[f64]) -> Self
    where
        Self: Sized;
}

impl SymmetricOperator for SparseSymMatrix {
    fn dim(&self) -> usize {
        SparseSymMatrix::dim(self)
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.matvec(x, y)
    }

    fn row_sums(&self) -> Vec<f64> {
        SparseSymMatrix::row_sums(self)
    }

    fn max_abs_row_sum(&self) -> f64 {
        SparseSymMatrix::max_abs_row_sum(self)
    }

    fn min_entry(&self) -> f64 {
        self.min_value().unwrap_or(0.0).min(0.0)
    }

    fn to_dense(&self) -> DMatrix<f64> {
        SparseSymMatrix::to_dense(self)
    }

    fn divide_by_degrees(&self, deg: &[f64]) -> Self {
        SparseSymMatrix::divide_by_degrees(self, deg)
    }
}

impl SymmetricOperator for DMatrix<f64> {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let n = self.nrows();
        for (i, yi) in y.iter_mut().enumerate().take(n) {
            *yi = (0..n).map(|j| self[(i, j)] * x[j]).sum();
        }
    }

    fn row_sums(&self) -> Vec<f64> {
        self.row_iter().map(|r| r.iter().sum()).collect()
    }

    fn max_abs_row_sum(&self) -> f64 {
        self.row_iter().map(|r| r.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max)
    }

    fn min_entry(&self) -> f64 {
        self.iter().copied().fold(0.0, f64::min)
    }

    fn to_dense(&self) -> DMatrix<f64> {
        self.clone()
    }

    fn divide_by_degrees(&self, deg: &[f64]) -> Self {
        DMatrix::from_fn(self.nrows(), self.ncols(), |i, j| self[(i, j)] / (deg[i] * deg[j]).sqrt())
    }
}

impl SymmetricOperator for SimilarityMatrix {
    fn dim(&self) -> usize {
        self.len()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.as_matrix().apply(x, y)
    }

    fn row_sums(&self) -> Vec<f64> {
        self.as_matrix().row_sums()
    }

    fn max_abs_row_sum(&self) -> f64 {
        self.as_matrix().max_abs_row_sum()
    }

    fn min_entry(&self) -> f64 {
        self.as_matrix().min_entry()
    }

    fn to_dense(&self) -> DMatrix<f64> {
        self.as_matrix().clone()
    }

    fn divide_by_degrees(&self, deg: &[f64]) -> Self {
        // normalized entries can leave [0, 1]; the wrapper is only a carrier here
        SimilarityMatrix::from_dense_unchecked(self.as_matrix().divide_by_degrees(deg))
    }
}

/// Row sums `D_ii = Σ_j A_ij`; negative entries are rejected.
pub fn degree_vector<A: SymmetricOperator>(a: &A) -> Result<Vec<f64>> {
    if a.min_entry() < 0.0 {
        return Err(Error::Domain("degree of a matrix with negative entries".into()));
    }
    Ok(a.row_sums())
}

/// `D^{-1/2} A D^{-1/2}` with degrees floored at [`DEGREE_FLOOR`].
pub fn normalized_laplacian<A: SymmetricOperator>(a: &A) -> Result<A> {
    let deg: Vec<f64> = degree_vector(a)?.into_iter().map(|d| d.max(DEGREE_FLOOR)).collect();
    Ok(a.divide_by_degrees(&deg))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenOptions {
    /// Number of algebraically largest eigenpairs.
    pub count: usize,
    /// Residual tolerance relative to the max absolute row sum.
    pub tol: f64,
    /// Budget of operator applications for the iterative path.
    pub max_iter: usize,
    pub seed: u64,
    /// Dimensions up to this use the dense solver.
    pub dense_cap: usize,
}

impl EigenOptions {
    pub fn new(count: usize, seed: u64) -> Self {
        Self { count, tol: 1e-10, max_iter: 20_000, seed, dense_cap: DEFAULT_DENSE_CAP }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenPairs {
    /// Descending.
    pub values: Vec<f64>,
    /// Unit length, sign-canonicalized, one per value.
    pub vectors: Vec<Vec<f64>>,
    /// `‖A v - λ v‖₂` per pair.
    pub residuals: Vec<f64>,
}

/// Flips `v` so its largest-magnitude entry (first one on ties) is
/// nonnegative.
pub fn canonicalize_sign(v: &mut [f64]) {
    let mut best = 0usize;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if v.get(best).is_some_and(|&x| x < 0.0) {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

/// The `opts.count` algebraically largest eigenpairs of `a`.
pub fn top_eigenpairs<A: SymmetricOperator>(a: &A, opts: &EigenOptions) -> Result<EigenPairs> {
    let n = a.dim();
    if opts.count < 1 || opts.count > n {
        return Err(Error::Parameter(format!("eigenpair count {} outside 1..={n}", opts.count)));
    }
    if n <= opts.dense_cap {
        dense_top_eigenpairs(&a.to_dense(), opts.count)
    } else {
        lanczos_top_eigenpairs(a, opts)
    }
}

/// `A - Σ shift_k u_k u_kᵀ` for orthonormal eigenvectors `u_k` of `A`.
struct Deflated<'a, A> {
    inner: &'a A,
    known: &'a [Vec<f64>],
    shifts: Vec<f64>,
}

/// The `opts.count` largest eigenpairs of `a` when the leading pairs
/// `(values[k], vectors[k])` are already known exactly. The known vectors
/// must be mutually orthogonal; they are returned first, normalized and in
/// the given order. The remaining pairs are solved on `a` with the known
/// vectors pushed below the rest of the spectrum, so a repeated leading
/// eigenvalue resolves to the given basis instead of an arbitrary one.
pub fn top_eigenpairs_with_known<A: SymmetricOperator>(a: &A, values: &[f64], vectors: &[Vec<f64>], opts: &EigenOptions) -> Result<EigenPairs> {
    let n = a.dim();
    if opts.count < 1 || opts.count > n {
        return Err(Error::Parameter(format!("eigenpair count {} outside 1..={n}", opts.count)));
    }
    if values.len() != vectors.len() || values.is_empty() || values.len() > opts.count {
        return Err(Error::Size(format!("{} known values for {} vectors, count {}", values.len(), vectors.len(), opts.count)));
    }
    let mut known = Vec::with_capacity(vectors.len());
    for u in vectors {
        if u.len() != n {
            return Err(Error::Size(format!("known vector has length {}, operator has dimension {n}", u.len())));
        }
        let mut u = u.clone();
        if norm(&u) == 0.0 {
            return Err(Error::Parameter("known eigenvector is zero".into()));
        }
        normalize(&mut u);
        canonicalize_sign(&mut u);
        known.push(u);
    }
    let mut out = EigenPairs {
        values: values.to_vec(),
        residuals: known.iter().zip(values).map(|(u, &l)| residual(a, u, l)).collect(),
        vectors: Vec::new(),
    };
    let rest_count = opts.count - known.len();
    if rest_count > 0 {
        let scale = a.max_abs_row_sum();
        let shifts = values.iter().map(|&l| l + 2.0 * scale + 1.0).collect();
        let defl = Deflated { inner: a, known: &known, shifts };
        let rest_opts = EigenOptions { count: rest_count, ..*opts };
        let rest = if n <= opts.dense_cap {
            dense_top_eigenpairs(&defl.to_dense(), rest_count)?
        } else {
            lanczos_top_eigenpairs(&defl, &rest_opts)?
        };
        for (val, v) in rest.values.into_iter().zip(rest.vectors) {
            out.residuals.push(residual(a, &v, val));
            out.values.push(val);
            out.vectors.push(v);
        }
    }
    known.append(&mut out.vectors);
    out.vectors = known;
    Ok(out)
}

impl<A: SymmetricOperator> SymmetricOperator for Deflated<'_, A> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.inner.apply(x, y);
        for (u, &shift) in self.known.iter().zip(&self.shifts) {
            let d = shift * dot(u, x);
            axpy(-d, u, y);
        }
    }

    fn row_sums(&self) -> Vec<f64> {
        self.to_dense().row_sums()
    }

    fn max_abs_row_sum(&self) -> f64 {
        // residual scale of the undeflated operator
        self.inner.max_abs_row_sum()
    }

    fn min_entry(&self) -> f64 {
        self.to_dense().min_entry()
    }

    fn to_dense(&self) -> DMatrix<f64> {
        let mut m = self.inner.to_dense();
        for (u, &shift) in self.known.iter().zip(&self.shifts) {
            let u = nalgebra::DVector::from_column_slice(u);
            m -= (&u * u.transpose()) * shift;
        }
        m
    }

    fn divide_by_degrees(&self, _deg: &[f64]) -> Self {
        unreachable!("deflated operators are never renormalized")
    }
}

/// Dense symmetric solve, keeping the `count` largest eigenpairs.
pub fn dense_top_eigenpairs(a: &DMatrix<f64>, count: usize) -> Result<EigenPairs> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::Size(format!("matrix must be square, got {:?}", a.shape())));
    }
    if count < 1 || count > n {
        return Err(Error::Parameter(format!("eigenpair count {count} outside 1..={n}")));
    }
    let sym = (a + a.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| eig.eigenvalues[y].total_cmp(&eig.eigenvalues[x]).then(x.cmp(&y)));
    let mut out = EigenPairs { values: Vec::new(), vectors: Vec::new(), residuals: Vec::new() };
    for &idx in order.iter().take(count) {
        let mut v: Vec<f64> = eig.eigenvectors.column(idx).iter().copied().collect();
        normalize(&mut v);
        canonicalize_sign(&mut v);
        let lambda = eig.eigenvalues[idx];
        out.residuals.push(residual(a, &v, lambda));
        out.values.push(lambda);
        out.vectors.push(v);
    }
    Ok(out)
}

/// Thick-restart symmetric Krylov iteration with full reorthogonalization.
///
/// The basis grows to `max(2c + 20, 40)` vectors (capped by the
/// dimension); on each restart it is compressed to the leading Ritz vectors
/// plus the current residual direction. A Krylov breakdown is continued
/// with a fresh seeded random direction orthogonal to the basis.
pub fn lanczos_top_eigenpairs<A: SymmetricOperator>(a: &A, opts: &EigenOptions) -> Result<EigenPairs> {
    let n = a.dim();
    let c = opts.count;
    if c < 1 || c > n {
        return Err(Error::Parameter(format!("eigenpair count {c} outside 1..={n}")));
    }
    let basis_cap = (2 * c + 20).max(40).min(n);
    let keep = (c + (basis_cap - c) / 2).min(basis_cap - 1).max(c);
    let scale = a.max_abs_row_sum().max(f64::MIN_POSITIVE);
    let threshold = opts.tol * scale;

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(basis_cap + 1);
    let mut start: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
    normalize(&mut start);
    basis.push(start);

    // projected matrix, column j filled when basis[j] is expanded
    let mut h = DMatrix::<f64>::zeros(basis_cap, basis_cap);
    let mut expanded = 0usize;
    let mut applications = 0usize;
    let mut w = vec![0.0; n];
    let mut best_residual = f64::INFINITY;

    loop {
        while expanded < basis_cap {
            let j = expanded;
            a.apply(&basis[j], &mut w);
            applications += 1;
            let coeffs = orthogonalize(&mut w, &basis);
            for (i, &hij) in coeffs.iter().enumerate().take(j + 1) {
                h[(i, j)] = hij;
                h[(j, i)] = hij;
            }
            expanded += 1;
            if expanded == basis_cap {
                // residual direction, orthogonal to the full basis
                let beta = norm(&w);
                if beta > 1e-300 {
                    w.iter_mut().for_each(|x| *x /= beta);
                }
                break;
            }
            let beta = norm(&w);
            if beta > 1e-10 * scale {
                w.iter_mut().for_each(|x| *x /= beta);
                basis.push(w.clone());
            } else {
                basis.push(random_orthogonal(&mut rng, &basis, n));
            }
        }

        let proj = h.view((0, 0), (expanded, expanded)).into_owned();
        let eig = SymmetricEigen::new(proj);
        let mut order: Vec<usize> = (0..expanded).collect();
        order.sort_by(|&x, &y| eig.eigenvalues[y].total_cmp(&eig.eigenvalues[x]).then(x.cmp(&y)));

        let ritz = |idx: usize| -> Vec<f64> {
            let y = eig.eigenvectors.column(idx);
            let mut v = vec![0.0; n];
            for (b, &coef) in basis.iter().zip(y.iter()) {
                axpy(coef, b, &mut v);
            }
            v
        };

        let mut pairs: Vec<(f64, Vec<f64>, f64)> = Vec::with_capacity(c);
        let mut worst = 0.0f64;
        for &idx in order.iter().take(c) {
            let mut v = ritz(idx);
            normalize(&mut v);
            let lambda = eig.eigenvalues[idx];
            let mut av = vec![0.0; n];
            a.apply(&v, &mut av);
            applications += 1;
            let r = av.iter().zip(&v).map(|(x, y)| (x - lambda * y).powi(2)).sum::<f64>().sqrt();
            worst = worst.max(r);
            pairs.push((lambda, v, r));
        }
        best_residual = best_residual.min(worst);

        if worst <= threshold || expanded == n {
            let mut out = EigenPairs { values: Vec::new(), vectors: Vec::new(), residuals: Vec::new() };
            for (lambda, mut v, r) in pairs {
                canonicalize_sign(&mut v);
                out.values.push(lambda);
                out.vectors.push(v);
                out.residuals.push(r);
            }
            return Ok(out);
        }
        if applications >= opts.max_iter {
            return Err(Error::Convergence { iterations: applications, best_residual });
        }

        // thick restart: leading Ritz vectors plus the residual direction
        let mut new_basis: Vec<Vec<f64>> = Vec::with_capacity(basis_cap + 1);
        let mut new_h = DMatrix::<f64>::zeros(basis_cap, basis_cap);
        for (slot, &idx) in order.iter().take(keep).enumerate() {
            let mut v = ritz(idx);
            // re-orthogonalize against the vectors already kept
            orthogonalize(&mut v, &new_basis);
            normalize(&mut v);
            new_basis.push(v);
            new_h[(slot, slot)] = eig.eigenvalues[idx];
        }
        let mut f = w.clone();
        orthogonalize(&mut f, &new_basis);
        if norm(&f) > 1e-8 {
            normalize(&mut f);
            new_basis.push(f);
        } else {
            new_basis.push(random_orthogonal(&mut rng, &new_basis, n));
        }
        basis = new_basis;
        h = new_h;
        // the kept Ritz block is already diagonal; expansion resumes at the
        // residual direction, which recomputes the coupling column
        expanded = keep;
    }
}

/// Two passes of classical Gram-Schmidt; returns the accumulated
/// projection coefficients.
fn orthogonalize(w: &mut [f64], basis: &[Vec<f64>]) -> Vec<f64> {
    let mut coeffs = vec![0.0; basis.len()];
    for _ in 0..2 {
        for (b, acc) in basis.iter().zip(coeffs.iter_mut()) {
            let d = dot(b, w);
            axpy(-d, b, w);
            *acc += d;
        }
    }
    coeffs
}

fn random_orthogonal(rng: &mut ChaCha8Rng, basis: &[Vec<f64>], n: usize) -> Vec<f64> {
    loop {
        let mut v: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
        normalize(&mut v);
        orthogonalize(&mut v, basis);
        if norm(&v) > 1e-6 {
            normalize(&mut v);
            return v;
        }
    }
}

/// `‖A v - λ v‖₂`.
pub fn residual<A: SymmetricOperator>(a: &A, v: &[f64], lambda: f64) -> f64 {
    let mut av = vec![0.0; v.len()];
    a.apply(v, &mut av);
    av.iter().zip(v).map(|(x, y)| (x - lambda * y).powi(2)).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn normalize(a: &mut [f64]) {
    let n = norm(a);
    if n > 0.0 {
        a.iter_mut().for_each(|x| *x /= n);
    }
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

use ips2::highorder::fold_eigenvector;
use ips2::spectral::{normalized_laplacian, top_eigenpairs, EigenOptions};
use ips2::tensorsim::{decomposable_unfolded, DENSE_VERIFICATION_CAP};
use ips2::SimilarityMatrix;
use nalgebra::DMatrix;
use proptest::prelude::*;

/// Block form: block (a, c) of `A ⊗ B` is `A[a, c] * B`.
fn block_kron(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let (p, q) = b.shape();
    let mut out = DMatrix::zeros(a.nrows() * p, a.ncols() * q);
    for ar in 0..a.nrows() {
        for ac in 0..a.ncols() {
            for br in 0..p {
                for bc in 0..q {
                    out[(ar * p + br, ac * q + bc)] = a[(ar, ac)] * b[(br, bc)];
                }
            }
        }
    }
    out
}

fn symmetric_nonneg(m: usize, vals: &[f64]) -> DMatrix<f64> {
    let mut s = DMatrix::zeros(m, m);
    let mut it = vals.iter();
    for i in 0..m {
        for j in i..m {
            let v = *it.next().unwrap();
            s[(i, j)] = v;
            s[(j, i)] = v;
        }
    }
    s
}

fn sym_strategy(lo: f64) -> impl Strategy<Value = DMatrix<f64>> {
    (2usize..=8).prop_flat_map(move |m| {
        prop::collection::vec(lo..1.0f64, m * (m + 1) / 2).prop_map(move |v| symmetric_nonneg(m, &v))
    })
}

#[test]
fn two_by_two_examples() {
    let id = SimilarityMatrix::from_dense(DMatrix::identity(2, 2)).unwrap();
    assert_eq!(decomposable_unfolded(&id, DENSE_VERIFICATION_CAP).unwrap().to_dense(), DMatrix::identity(4, 4));

    let s = SimilarityMatrix::from_dense(DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.5, 1.0])).unwrap();
    let t = decomposable_unfolded(&s, DENSE_VERIFICATION_CAP).unwrap();
    // (i=1, j=2) -> r = 2(2-1)+1 = 3; (k=2, l=1) -> s = 2(1-1)+2 = 2 (1-based)
    assert_eq!(t.get(2, 1), 0.25);
}

#[test]
fn cap_guards_blowup() {
    let s = SimilarityMatrix::from_dense(DMatrix::identity(5, 5)).unwrap();
    assert!(decomposable_unfolded(&s, 4).is_err());
}

proptest! {
    #[test]
    fn decomposable_equals_kronecker(s in sym_strategy(0.0)) {
        let sim = SimilarityMatrix::from_dense(s.clone()).unwrap();
        let t = decomposable_unfolded(&sim, DENSE_VERIFICATION_CAP).unwrap().to_dense();
        prop_assert_eq!(t, block_kron(&s, &s));
    }

    #[test]
    fn laplacian_of_kronecker_is_kronecker_of_laplacians(s in sym_strategy(0.01)) {
        let l = normalized_laplacian(&s).unwrap();
        let lhat = normalized_laplacian(&block_kron(&s, &s)).unwrap();
        let expected = block_kron(&l, &l);
        for (a, b) in lhat.iter().zip(expected.iter()) {
            prop_assert!((a - b).abs() <= 1e-10, "{} vs {}", a, b);
        }
    }

    #[test]
    fn dominant_eigenvector_is_kronecker_square(s in sym_strategy(0.01)) {
        let m = s.nrows();
        let l = normalized_laplacian(&s).unwrap();
        let e = top_eigenpairs(&l, &EigenOptions::new(2, 0)).unwrap();
        prop_assume!(e.values[0] - e.values[1] > 1e-6);
        let v = &e.vectors[0];
        let lhat = normalized_laplacian(&block_kron(&s, &s)).unwrap();
        let ehat = top_eigenpairs(&lhat, &EigenOptions::new(1, 0)).unwrap();
        let vhat = &ehat.vectors[0];
        // (v ⊗ v) in the block-Kronecker layout is symmetric under the pair
        // swap, so it coincides with the unfolding's layout
        let vv: Vec<f64> = (0..m * m).map(|r| v[r / m] * v[r % m]).collect();
        let minus: f64 = vhat.iter().zip(&vv).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        let plus: f64 = vhat.iter().zip(&vv).map(|(a, b)| (a + b).powi(2)).sum::<f64>().sqrt();
        prop_assert!(minus.min(plus) <= 1e-6, "{} {}", minus, plus);
        // folded, it is the rank-one matrix v vᵀ
        let f = fold_eigenvector(vhat, m).unwrap();
        let outer = nalgebra::DVector::from_column_slice(v) * nalgebra::DVector::from_column_slice(v).transpose();
        prop_assert!((f - outer).norm() <= 1e-6);
    }

    #[test]
    fn normalized_spectrum_within_unit_interval(s in sym_strategy(0.0)) {
        let l = normalized_laplacian(&s).unwrap();
        let n = l.nrows();
        let e = top_eigenpairs(&l, &EigenOptions::new(n, 0)).unwrap();
        for v in e.values {
            prop_assert!((-1.0 - 1e-10..=1.0 + 1e-10).contains(&v), "{}", v);
        }
    }
}

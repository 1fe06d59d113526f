use ips2::dataset::Dataset;
use ips2::pairwise::{knn_sets, pairwise_distances};
use ips2::tensorsim::{build_sparse_tensor, fold_index, indecomposable_entry, ratio_entry, unfold_index, TensorParams};
use ips2::DistanceMatrix;
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_dataset(m: usize, n: usize, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Dataset::new(DMatrix::from_fn(m, n, |_, _| rng.random::<f64>() * 3.0), None, "random").unwrap()
}

/// Straight evaluation of the distance-ratio formula, independent of the
/// library's helpers.
fn formula(d: &DistanceMatrix, i: usize, j: usize, k: usize, l: usize, p: &TensorParams) -> f64 {
    let num = d.get(i, j) + d.get(k, l);
    let den = d.get(i, k) + d.get(j, l) + p.eps;
    (-p.sigma_t * num / den).exp()
}

#[test]
fn unfold_examples() {
    assert_eq!(unfold_index(1, 1, 5).unwrap(), 1);
    assert_eq!(unfold_index(2, 3, 4).unwrap(), 10);
    assert_eq!(unfold_index(6, 6, 6).unwrap(), 36);
    assert!(unfold_index(0, 1, 3).is_err());
    assert!(unfold_index(1, 4, 3).is_err());
    assert_eq!(fold_index(1, 5).unwrap(), (1, 1));
    assert!(fold_index(17, 4).is_err());
}

#[test]
fn fold_inverts_unfold_by_search() {
    // (r=10, m=4): search all (i, j) for the one that unfolds to 10
    let hits: Vec<(usize, usize)> =
        (1..=4).flat_map(|i| (1..=4).map(move |j| (i, j))).filter(|&(i, j)| unfold_index(i, j, 4).unwrap() == 10).collect();
    assert_eq!(hits, vec![(2, 3)]);
    assert_eq!(fold_index(10, 4).unwrap(), (2, 3));
    for r in 1..=49 {
        let (i, j) = fold_index(r, 7).unwrap();
        assert_eq!(unfold_index(i, j, 7).unwrap(), r);
    }
}

#[test]
fn entry_closed_forms() {
    let p = TensorParams::default();
    let d = DistanceMatrix::from_dense(DMatrix::from_row_slice(2, 2, &[0.0, 2.0, 2.0, 0.0])).unwrap();
    assert_eq!(indecomposable_entry(&d, 0, 0, 0, 0, &p), 1.0);
    assert!((ratio_entry(1.0, 1.0, 1.0, 1.0, 1.0, 0.0) - (-1.0f64).exp()).abs() < 1e-15);
    assert!((ratio_entry(1.0, 1.0, 2.0, 2.0, 1.0, 0.0) - 0.606_530_659_712_633_4).abs() < 1e-15);
}

#[test]
fn sparse_equals_dense_quadruple_loop() {
    for seed in 0..5 {
        let m = 4 + seed as usize;
        let d = pairwise_distances(&random_dataset(m, 3, seed));
        let p = TensorParams { k: m - 1, ..TensorParams::default() };
        let t = build_sparse_tensor(&d, &knn_sets(&d, m - 1).unwrap(), &p).unwrap().to_dense();
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    for l in 0..m {
                        let r = unfold_index(i + 1, j + 1, m).unwrap() - 1;
                        let s = unfold_index(k + 1, l + 1, m).unwrap() - 1;
                        let want = formula(&d, i, j, k, l, &p);
                        assert!((t[(r, s)] - want).abs() <= 1e-14, "({i},{j},{k},{l}) {} vs {want}", t[(r, s)]);
                    }
                }
            }
        }
    }
}

#[test]
fn sparse_pattern_on_line_example() {
    // points 0, 1, 10 with k = 1: N̄(0) = {0,1}, N̄(1) = {0,1,2}, N̄(2) = {1,2}
    let d = Dataset::new(DMatrix::from_column_slice(3, 1, &[0.0, 1.0, 10.0]), None, "line").unwrap();
    let dist = pairwise_distances(&d);
    let nbar: [&[usize]; 3] = [&[0, 1], &[0, 1, 2], &[1, 2]];
    let p = TensorParams { k: 1, ..TensorParams::default() };
    let t = build_sparse_tensor(&dist, &knn_sets(&dist, 1).unwrap(), &p).unwrap();
    let mut expected = 0;
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                for l in 0..3 {
                    let r = unfold_index(i + 1, j + 1, 3).unwrap() - 1;
                    let s = unfold_index(k + 1, l + 1, 3).unwrap() - 1;
                    let inside = nbar[i].contains(&k) && nbar[j].contains(&l);
                    assert_eq!(t.is_stored(r, s), inside, "({i},{j},{k},{l})");
                    expected += inside as usize;
                }
            }
        }
    }
    assert_eq!(t.nnz_logical(), expected);
}

#[test]
fn stored_count_is_bounded() {
    let m = 30;
    let k = 4;
    let d = pairwise_distances(&random_dataset(m, 5, 11));
    let nbrs = knn_sets(&d, k).unwrap();
    let p = TensorParams { k, ..TensorParams::default() };
    let t = build_sparse_tensor(&d, &nbrs, &p).unwrap();
    let sizes: Vec<usize> = nbrs.nbrs.iter().map(Vec::len).collect();
    let s: usize = sizes.iter().sum();
    assert_eq!(t.nnz_logical(), s * s);
    assert!(t.nnz_logical() <= m * m * m * m);
    for (r, c, _) in t.iter() {
        assert!(r <= c);
    }
}

proptest! {
    #[test]
    fn entry_symmetries(seed in 0u64..1000, idx in prop::array::uniform4(0usize..6)) {
        let d = pairwise_distances(&random_dataset(6, 2, seed));
        let p = TensorParams::default();
        let [i, j, k, l] = idx;
        let v = indecomposable_entry(&d, i, j, k, l, &p);
        prop_assert_eq!(v, indecomposable_entry(&d, k, l, i, j, &p));
        prop_assert_eq!(v, indecomposable_entry(&d, j, i, l, k, &p));
        prop_assert!(v > 0.0 || v == 0.0 && i != j);
        prop_assert!(v <= 1.0);
    }

    #[test]
    fn scale_invariance_without_eps(seed in 0u64..1000, idx in prop::array::uniform4(0usize..6), e in -20i32..20, alpha in 0.01f64..100.0) {
        let d = pairwise_distances(&random_dataset(6, 2, seed));
        let [i, j, k, l] = idx;
        prop_assume!(d.get(i, k) + d.get(j, l) > 0.0);
        let at = |d: &DistanceMatrix| ratio_entry(d.get(i, j), d.get(k, l), d.get(i, k), d.get(j, l), 1.0, 0.0);
        let base = at(&d);
        // power-of-two scaling is exact in floating point, so is the value
        prop_assert_eq!(base, at(&d.scaled(2f64.powi(e))));
        // otherwise the ratio carries a few ulps, which exp scales by |ln v|
        let scaled = at(&d.scaled(alpha));
        let tol = 8.0 * f64::EPSILON * (1.0 + base.ln().abs()) * base;
        prop_assert!((base - scaled).abs() <= tol, "{} vs {}", base, scaled);
    }

    #[test]
    fn stored_values_match_formula(seed in 0u64..200, k in 1usize..5) {
        let m = 8;
        let d = pairwise_distances(&random_dataset(m, 3, seed));
        let p = TensorParams { k, ..TensorParams::default() };
        let t = build_sparse_tensor(&d, &knn_sets(&d, k).unwrap(), &p).unwrap();
        for (r, s, v) in t.iter() {
            let (i, j) = (r % m, r / m);
            let (kk, l) = (s % m, s / m);
            prop_assert!((v - formula(&d, i, j, kk, l, &p)).abs() <= 1e-15);
        }
    }
}

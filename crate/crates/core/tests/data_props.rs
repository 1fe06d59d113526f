use ips2::dataset::{load_csv, standardize, write_csv, Dataset, LabelColumn, Standardize};
use ips2::pairwise::{gaussian_similarity, knn_sets, median_bandwidth, pairwise_distances};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn dataset_strategy() -> impl Strategy<Value = Dataset> {
    (2usize..12, 1usize..6).prop_flat_map(|(m, n)| {
        (prop::collection::vec(-1e3f64..1e3, m * n), prop::collection::vec(0usize..3, m))
            .prop_map(move |(vals, labels)| Dataset::new(DMatrix::from_row_slice(m, n, &vals), Some(labels), "p").unwrap())
    })
}

fn permutation_strategy(m: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..m).collect::<Vec<_>>()).prop_shuffle()
}

#[test]
fn distances_match_naive_loop() {
    let d = Dataset::new(DMatrix::from_row_slice(3, 4, &[0.5, 1.0, -2.0, 3.0, 1.5, 0.0, 0.25, -1.0, 2.0, 2.0, 2.0, 2.0]), None, "x").unwrap();
    let dist = pairwise_distances(&d);
    for i in 0..3 {
        for j in 0..3 {
            let mut acc = 0.0;
            for f in 0..4 {
                let diff = d.samples[(i, f)] - d.samples[(j, f)];
                acc += diff * diff;
            }
            assert!((dist.get(i, j) - acc.sqrt()).abs() <= 1e-12);
        }
    }
}

#[test]
fn kernel_matches_scalar_formula() {
    let d = Dataset::new(DMatrix::from_row_slice(4, 2, &[0.0, 0.0, 1.0, 2.0, -1.0, 0.5, 3.0, 3.0]), None, "x").unwrap();
    let dist = pairwise_distances(&d);
    let sigma = median_bandwidth(&dist);
    let s = gaussian_similarity(&dist, sigma).unwrap();
    for i in 0..4 {
        for j in 0..4 {
            let want = (-dist.get(i, j).powi(2) / (2.0 * sigma * sigma)).exp();
            assert!((s.get(i, j) - want).abs() <= 1e-15);
        }
    }
}

proptest! {
    #[test]
    fn csv_round_trip(d in dataset_strategy()) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.csv");
        write_csv(&d, &path).unwrap();
        let back = load_csv(&path, Some(&LabelColumn::Name("label".into())), true).unwrap();
        prop_assert_eq!(&back.samples, &d.samples);
        prop_assert_eq!(&back.labels, &d.labels);
    }

    #[test]
    fn zscore_is_idempotent(d in dataset_strategy()) {
        let once = standardize(&d, Standardize::Zscore);
        let twice = standardize(&once, Standardize::Zscore);
        for (a, b) in once.samples.iter().zip(twice.samples.iter()) {
            prop_assert!((a - b).abs() <= 1e-12, "{} vs {}", a, b);
        }
        prop_assert_eq!(standardize(&d, Standardize::None), d);
    }

    #[test]
    fn kernel_is_monotone(d in dataset_strategy(), sigma in 0.1f64..1e3) {
        let dist = pairwise_distances(&d);
        let s = gaussian_similarity(&dist, sigma).unwrap();
        let m = d.n_samples();
        for a in 0..m {
            for b in 0..m {
                for c in 0..m {
                    for e in 0..m {
                        if dist.get(a, b) < dist.get(c, e) {
                            prop_assert!(s.get(a, b) >= s.get(c, e));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn similarity_is_permutation_equivariant((d, perm) in dataset_strategy().prop_flat_map(|d| { let m = d.n_samples(); (Just(d), permutation_strategy(m)) })) {
        let dist = pairwise_distances(&d);
        let s = gaussian_similarity(&dist, median_bandwidth(&dist)).unwrap();
        let pd = pairwise_distances(&d.permuted(&perm).unwrap());
        let ps = gaussian_similarity(&pd, median_bandwidth(&pd)).unwrap();
        for i in 0..perm.len() {
            for j in 0..perm.len() {
                prop_assert_eq!(ps.get(i, j), s.get(perm[i], perm[j]));
            }
        }
    }

    #[test]
    fn neighbor_relation_is_symmetric_and_reflexive(d in dataset_strategy(), k in 1usize..11) {
        let m = d.n_samples();
        let k = k.min(m - 1);
        let nb = knn_sets(&pairwise_distances(&d), k).unwrap();
        for i in 0..m {
            prop_assert!(nb.contains(i, i));
            prop_assert!(nb.nbrs[i].len() > k);
            for j in 0..m {
                prop_assert_eq!(nb.contains(i, j), nb.contains(j, i));
            }
        }
        if k == m - 1 {
            prop_assert_eq!(nb.total_size(), m * m);
        }
    }
}

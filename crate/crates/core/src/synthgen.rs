//! Seeded synthetic datasets and additive noise models.
//!
//! Randomness comes from ChaCha8 keyed by `(seed, domain)`. Each sample
//! (row) reads its own stream, selected with the ChaCha stream id, and
//! features are drawn in column order within that stream. Output therefore
//! does not depend on the order in which rows are generated, and a row's
//! values do not change when other rows are added.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, Normal};
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};

const DOMAIN_CLUSTERS: u64 = 0x636c_7573;
const DOMAIN_WHITE_NOISE: u64 = 0x7768_6974;
const DOMAIN_ADDED_NOISE: u64 = 0x6e6f_6973;

pub const USDATA_MEANS: [f64; 3] = [0.1, 0.5, 1.0];
pub const USDATA_STD: f64 = 0.5;
pub const USDATA1_CLUSTER_SIZE: usize = 20;
pub const USDATA1_NOISE_STD: f64 = 0.5;
pub const USDATA2_DIM: usize = 2360;

/// Generator for row `row` of the draw identified by `(seed, domain)`.
pub fn row_rng(seed: u64, domain: u64, row: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&domain.to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(row);
    rng
}

/// Samples of cluster `g` are i.i.d. `Normal(means[g], std^2)` in every
/// feature; labels follow the cluster order.
pub fn gen_gaussian_clusters(sizes: &[usize], means: &[f64], std: f64, dim: usize, seed: u64) -> Result<Dataset> {
    if sizes.len() != means.len() {
        return Err(Error::Size(format!("{} cluster sizes for {} means", sizes.len(), means.len())));
    }
    if !(std > 0.0 && std.is_finite()) {
        return Err(Error::Parameter(format!("std must be positive, got {std}")));
    }
    if dim < 1 {
        return Err(Error::Parameter("dim must be at least 1".into()));
    }
    let m: usize = sizes.iter().sum();
    let mut labels = Vec::with_capacity(m);
    for (g, &n) in sizes.iter().enumerate() {
        labels.extend(std::iter::repeat_n(g, n));
    }
    let mut samples = DMatrix::zeros(m, dim);
    for (row, &g) in labels.iter().enumerate() {
        let normal = Normal::new(means[g], std).map_err(|e| Error::Parameter(e.to_string()))?;
        let mut rng = row_rng(seed, DOMAIN_CLUSTERS, row as u64);
        for j in 0..dim {
            samples[(row, j)] = normal.sample(&mut rng);
        }
    }
    let name = format!("gaussian_clusters_{}x{dim}", m);
    Dataset::new(samples, Some(labels), name)
}

/// Three 20-sample clusters (means 0.1, 0.5, 1; std 0.5) plus white
/// Gaussian noise of std 0.5.
pub fn gen_usdata1(dim: usize, seed: u64) -> Result<Dataset> {
    gen_usdata1_with_noise(dim, USDATA1_NOISE_STD, seed)
}

/// [`gen_usdata1`] with a custom white-noise level (noise-level sweeps).
pub fn gen_usdata1_with_noise(dim: usize, noise_std: f64, seed: u64) -> Result<Dataset> {
    let sizes = [USDATA1_CLUSTER_SIZE; 3];
    let clean = gen_gaussian_clusters(&sizes, &USDATA_MEANS, USDATA_STD, dim, seed)?;
    let mut d = if noise_std > 0.0 {
        add_noise_in_domain(&clean, &NoiseModel::Gaussian { std: noise_std }, seed, DOMAIN_WHITE_NOISE)?
    } else {
        clean
    };
    d.name = format!("usdata1_dim{dim}_noise{noise_std}");
    Ok(d)
}

/// Clusters 1 and 2 have 20 samples, cluster 3 has `n3`; 2360 features.
pub fn gen_usdata2(n3: usize, seed: u64) -> Result<Dataset> {
    gen_usdata2_with_dim(n3, USDATA2_DIM, seed)
}

/// [`gen_usdata2`] with a reduced feature dimension.
pub fn gen_usdata2_with_dim(n3: usize, dim: usize, seed: u64) -> Result<Dataset> {
    if n3 < 1 {
        return Err(Error::Parameter("cluster 3 needs at least one sample".into()));
    }
    let mut d = gen_gaussian_clusters(&[20, 20, n3], &USDATA_MEANS, USDATA_STD, dim, seed)?;
    d.name = format!("usdata2_n3_{n3}_dim{dim}");
    Ok(d)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NoiseModel {
    /// Uniform on the open interval `(0, 1)`.
    Uniform,
    Gaussian { std: f64 },
    /// Density `x / b^2 exp(-x^2 / (2 b^2))`.
    Rayleigh { scale: f64 },
    /// Density `x^(a-1) e^(-x/b) / (b^a Γ(a))`.
    Gamma { shape: f64, scale: f64 },
}

impl NoiseModel {
    /// Uniform on (0, 1); Gaussian std 0.5; Rayleigh scale 0.5; Gamma
    /// shape 5, scale 10.
    pub fn standard(kind: &str) -> Result<Self> {
        match kind {
            "uniform" => Ok(Self::Uniform),
            "gaussian" => Ok(Self::Gaussian { std: 0.5 }),
            "rayleigh" => Ok(Self::Rayleigh { scale: 0.5 }),
            "gamma" => Ok(Self::Gamma { shape: 5.0, scale: 10.0 }),
            other => Err(Error::Parameter(format!("unknown noise model '{other}'"))),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Self::Uniform => true,
            Self::Gaussian { std } => std > 0.0 && std.is_finite(),
            Self::Rayleigh { scale } => scale > 0.0 && scale.is_finite(),
            Self::Gamma { shape, scale } => shape > 0.0 && scale > 0.0 && shape.is_finite() && scale.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Parameter(format!("invalid noise parameters {self:?}")))
        }
    }

    /// Closed-form mean and variance.
    pub fn moments(&self) -> (f64, f64) {
        use std::f64::consts::PI;
        match *self {
            Self::Uniform => (0.5, 1.0 / 12.0),
            Self::Gaussian { std } => (0.0, std * std),
            Self::Rayleigh { scale } => (scale * (PI / 2.0).sqrt(), (4.0 - PI) / 2.0 * scale * scale),
            Self::Gamma { shape, scale } => (shape * scale, shape * scale * scale),
        }
    }

    fn sampler(&self) -> Result<NoiseSampler> {
        self.validate()?;
        Ok(match *self {
            Self::Uniform => NoiseSampler::Uniform,
            Self::Gaussian { std } => {
                NoiseSampler::Normal(Normal::new(0.0, std).map_err(|e| Error::Parameter(e.to_string()))?)
            }
            Self::Rayleigh { scale } => NoiseSampler::Rayleigh(scale),
            Self::Gamma { shape, scale } => {
                NoiseSampler::Gamma(Gamma::new(shape, scale).map_err(|e| Error::Parameter(e.to_string()))?)
            }
        })
    }
}

enum NoiseSampler {
    Uniform,
    Normal(Normal<f64>),
    Rayleigh(f64),
    Gamma(Gamma<f64>),
}

impl NoiseSampler {
    fn sample(&self, rng: &mut ChaCha8Rng) -> f64 {
        match self {
            NoiseSampler::Uniform => open_unit(rng),
            NoiseSampler::Normal(n) => n.sample(rng),
            // inverse CDF
            NoiseSampler::Rayleigh(b) => b * (-2.0 * open_unit(rng).ln()).sqrt(),
            NoiseSampler::Gamma(g) => g.sample(rng),
        }
    }
}

/// Uniform on the open interval (0, 1).
fn open_unit(rng: &mut ChaCha8Rng) -> f64 {
    loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            return u;
        }
    }
}

/// Adds i.i.d. noise from `model` to every feature; labels are unchanged.
pub fn add_noise(d: &Dataset, model: &NoiseModel, seed: u64) -> Result<Dataset> {
    add_noise_in_domain(d, model, seed, DOMAIN_ADDED_NOISE)
}

fn add_noise_in_domain(d: &Dataset, model: &NoiseModel, seed: u64, domain: u64) -> Result<Dataset> {
    let sampler = model.sampler()?;
    let mut out = d.clone();
    for row in 0..d.n_samples() {
        let mut rng = row_rng(seed, domain, row as u64);
        for j in 0..d.n_features() {
            out.samples[(row, j)] += sampler.sample(&mut rng);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zeros(m: usize, n: usize) -> Dataset {
        Dataset::new(DMatrix::zeros(m, n), None, "zeros").unwrap()
    }

    fn mean_std(xs: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
        let n = xs.clone().count() as f64;
        let mean = xs.clone().sum::<f64>() / n;
        let var = xs.map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        (mean, var.sqrt())
    }

    #[test]
    fn cluster_means_within_three_standard_errors() {
        let d = gen_gaussian_clusters(&[20, 20, 20], &USDATA_MEANS, 0.5, 500, 11).unwrap();
        let tol = 3.0 * 0.5 / (20.0f64 * 500.0).sqrt();
        for (g, target) in USDATA_MEANS.iter().enumerate() {
            let vals: Vec<f64> = (g * 20..(g + 1) * 20).flat_map(|r| d.samples.row(r).iter().copied().collect::<Vec<_>>()).collect();
            let mean = vals.iter().sum::<f64>() / vals.len() as f64;
            assert!((mean - target).abs() < tol, "cluster {g}: {mean}");
        }
    }

    #[test]
    fn near_deterministic_single_sample() {
        let d = gen_gaussian_clusters(&[1], &[3.0], 1e-9, 1, 0);
        // a dataset needs two samples
        assert!(d.is_err());
        let d = gen_gaussian_clusters(&[2], &[3.0], 1e-9, 1, 0).unwrap();
        assert!((d.samples[(0, 0)] - 3.0).abs() < 1e-7);
    }

    #[test]
    fn mismatched_lists() {
        assert!(matches!(gen_gaussian_clusters(&[2, 2], &[1.0], 1.0, 3, 0), Err(Error::Size(_))));
    }

    #[test]
    fn usdata_shapes_and_determinism() {
        let a = gen_usdata1(500, 3).unwrap();
        assert_eq!(a.samples.shape(), (60, 500));
        let expected: Vec<usize> = (0..3).flat_map(|g| std::iter::repeat_n(g, 20)).collect();
        assert_eq!(a.labels.as_ref().unwrap(), &expected);
        assert_eq!(a, gen_usdata1(500, 3).unwrap());
        assert_ne!(a, gen_usdata1(500, 4).unwrap());
        assert_eq!(gen_usdata1(1, 3).unwrap().samples.shape(), (60, 1));

        assert_eq!(gen_usdata2_with_dim(10, 50, 1).unwrap().n_samples(), 50);
        assert_eq!(gen_usdata2_with_dim(235, 5, 1).unwrap().n_samples(), 275);
        assert_eq!(gen_usdata2_with_dim(10, 50, 1).unwrap(), gen_usdata2_with_dim(10, 50, 1).unwrap());
        assert_eq!(gen_usdata2(10, 1).unwrap().n_features(), 2360);
    }

    #[test]
    fn rows_do_not_depend_on_other_rows() {
        let small = gen_usdata2_with_dim(10, 30, 9).unwrap();
        let big = gen_usdata2_with_dim(100, 30, 9).unwrap();
        for r in 0..50 {
            assert_eq!(small.samples.row(r), big.samples.row(r));
        }
    }

    #[test]
    fn uniform_support() {
        let d = add_noise(&zeros(100, 100), &NoiseModel::Uniform, 1).unwrap();
        assert!(d.samples.iter().all(|&x| x > 0.0 && x < 1.0));
    }

    #[test]
    fn gaussian_moments() {
        let d = add_noise(&zeros(100, 1000), &NoiseModel::standard("gaussian").unwrap(), 2).unwrap();
        let (mean, std) = mean_std(d.samples.iter().copied());
        assert!(mean.abs() < 0.01, "{mean}");
        assert!((std - 0.5).abs() < 0.01, "{std}");
    }

    #[test]
    fn rayleigh_mean() {
        let d = add_noise(&zeros(100, 1000), &NoiseModel::standard("rayleigh").unwrap(), 3).unwrap();
        assert!(d.samples.iter().all(|&x| x > 0.0));
        let (mean, _) = mean_std(d.samples.iter().copied());
        let exact = 0.5 * (std::f64::consts::PI / 2.0).sqrt();
        assert!((exact - 0.626657).abs() < 1e-6);
        assert!((mean - exact).abs() < 0.02 * exact, "{mean}");
    }

    #[test]
    fn invalid_noise_parameters() {
        let d = zeros(2, 2);
        assert!(add_noise(&d, &NoiseModel::Gaussian { std: 0.0 }, 0).is_err());
        assert!(add_noise(&d, &NoiseModel::Rayleigh { scale: -1.0 }, 0).is_err());
        assert!(add_noise(&d, &NoiseModel::Gamma { shape: 5.0, scale: 0.0 }, 0).is_err());
        assert!(NoiseModel::standard("salt").is_err());
    }

    #[test]
    fn labels_survive_noise() {
        let d = gen_usdata1(4, 0).unwrap();
        let n = add_noise(&d, &NoiseModel::Uniform, 0).unwrap();
        assert_eq!(d.labels, n.labels);
    }
}

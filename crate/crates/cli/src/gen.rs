use ips2::dataset::load_csv;
use ips2::synthgen::{add_noise, gen_gaussian_clusters, gen_usdata1_with_noise, gen_usdata2_with_dim};
use ips2::Dataset;

use crate::error::{HarnessError, Result};
use crate::spec::{DataSource, GeneratorSpec};

pub fn generate(spec: &GeneratorSpec, seed: u64) -> Result<Dataset> {
    Ok(match spec {
        GeneratorSpec::Usdata1 { dim, noise_std } => gen_usdata1_with_noise(*dim, *noise_std, seed)?,
        GeneratorSpec::Usdata2 { n3, dim } => gen_usdata2_with_dim(*n3, *dim, seed)?,
        GeneratorSpec::Gaussian { sizes, means, std, dim } => gen_gaussian_clusters(sizes, means, *std, *dim, seed)?,
    })
}

/// The dataset a run with `run_seed` works on.
pub fn dataset_for_run(source: &DataSource, experiment_seed: u64, run_seed: u64) -> Result<Dataset> {
    match source {
        DataSource::Csv { path, label_column, has_header } => load_csv(path, Some(label_column), *has_header).map_err(|e| match e {
            ips2::Error::Parameter(msg) => HarnessError::Usage(msg),
            e => e.into(),
        }),
        DataSource::Generator { generator, noise, resample_per_run } => {
            let seed = if *resample_per_run { run_seed } else { experiment_seed };
            let d = generate(generator, seed)?;
            Ok(match noise {
                Some(model) => add_noise(&d, model, seed)?,
                None => d,
            })
        }
    }
}

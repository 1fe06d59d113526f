use std::path::{Path, PathBuf};

use ips2::dataset::LabelColumn;
use ips2::synthgen::NoiseModel;
use ips2::{ClusterConfig, Method};
use serde::{Deserialize, Serialize};

use crate::error::{io_err, HarnessError, Result};

/// Synthetic dataset recipes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum GeneratorSpec {
    /// Three 20-sample clusters plus white Gaussian noise of `noise_std`.
    Usdata1 { dim: usize, noise_std: f64 },
    /// 20 + 20 + `n3` samples.
    Usdata2 { n3: usize, dim: usize },
    Gaussian { sizes: Vec<usize>, means: Vec<f64>, std: f64, dim: usize },
}

impl GeneratorSpec {
    pub fn n_classes(&self) -> usize {
        match self {
            Self::Usdata1 { .. } | Self::Usdata2 { .. } => 3,
            Self::Gaussian { sizes, .. } => sizes.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum DataSource {
    Csv { path: PathBuf, label_column: LabelColumn, has_header: bool },
    Generator {
        generator: GeneratorSpec,
        /// Additive noise applied after generation.
        noise: Option<NoiseModel>,
        /// Draw a fresh dataset for every run from the run's seed; otherwise
        /// every run uses the dataset drawn from the experiment seed.
        resample_per_run: bool,
    },
}

/// Everything a benchmark report depends on. The output directory is not
/// part of it, so the same spec reproduces the same report anywhere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub data: DataSource,
    pub methods: Vec<Method>,
    pub config: ClusterConfig,
    pub repeats: usize,
    /// Run `r` uses seed `seed + r`.
    pub seed: u64,
    /// Dump S, V, U and their histograms for the first run.
    pub dump: bool,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if self.repeats < 1 {
            return Err(HarnessError::Usage("repeats must be at least 1".into()));
        }
        if self.methods.is_empty() {
            return Err(HarnessError::Usage("at least one method is required".into()));
        }
        let mut sorted = self.methods.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != self.methods.len() {
            return Err(HarnessError::Usage("methods must not repeat".into()));
        }
        if self.seed.checked_add(self.repeats as u64 - 1).is_none() {
            return Err(HarnessError::Usage("seed range overflows".into()));
        }
        self.config.validate().map_err(|e| HarnessError::Usage(e.to_string()))?;
        Ok(())
    }

    pub fn seeds(&self) -> Vec<u64> {
        (0..self.repeats as u64).map(|r| self.seed + r).collect()
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(io_err(path))?;
        serde_json::from_str(&text).map_err(|source| HarnessError::Json { path: path.to_path_buf(), source })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("spec serializes");
        s.push('\n');
        s
    }
}

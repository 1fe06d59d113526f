//! Benchmark report schema.
//!
//! ```text
//! {
//!   "schema_version": 1,
//!   "dataset": { "name", "n_samples", "n_features", "n_classes" },
//!   "spec":    ExperimentSpec,
//!   "seeds":   [u64],
//!   "summary": [ { "method", "ok_runs", "failed_runs", "single_run",
//!                  "metrics": [ { "name", "mean", "std" } ] } ],
//!   "runs":    [ { "seed", "method", "status": "ok" | "failed", ... } ]
//! }
//! ```
//!
//! `std` is the sample standard deviation (n - 1 denominator) over the
//! successful runs; with a single run it is 0 and `single_run` is true.
//! Runs are sorted by seed, then by the method order of the spec.
//! Wall-clock times live in a separate `timings.json`.

use ips2::{Dataset, Method, MetricSet};
use serde::{Deserialize, Serialize};

use crate::spec::ExperimentSpec;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetInfo {
    pub name: String,
    pub n_samples: usize,
    pub n_features: usize,
    pub n_classes: usize,
}

impl DatasetInfo {
    pub fn of(d: &Dataset) -> Self {
        Self { name: d.name.clone(), n_samples: d.n_samples(), n_features: d.n_features(), n_classes: d.n_classes().unwrap_or(0) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricStat {
    pub name: String,
    pub mean: f64,
    pub std: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodSummary {
    pub method: Method,
    pub ok_runs: usize,
    pub failed_runs: usize,
    pub single_run: bool,
    /// Empty when no run succeeded.
    pub metrics: Vec<MetricStat>,
}

impl MethodSummary {
    pub fn mean(&self, metric: &str) -> Option<f64> {
        self.metrics.iter().find(|m| m.name == metric).map(|m| m.mean)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum RunOutcome {
    Ok {
        metrics: MetricSet,
        objective: f64,
        high_order_degenerate: bool,
        embedding_degenerate: bool,
        max_eigen_residual: Option<f64>,
        warnings: Vec<String>,
    },
    Failed {
        error: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub seed: u64,
    pub method: Method,
    #[serde(flatten)]
    pub outcome: RunOutcome,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub schema_version: u32,
    pub dataset: DatasetInfo,
    pub spec: ExperimentSpec,
    pub seeds: Vec<u64>,
    pub summary: Vec<MethodSummary>,
    pub runs: Vec<RunRecord>,
}

/// Mean and sample standard deviation; the deviation is 0 for one value.
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

impl MetricsReport {
    pub fn assemble(spec: &ExperimentSpec, dataset: DatasetInfo, mut runs: Vec<RunRecord>) -> Self {
        let order = |m: Method| spec.methods.iter().position(|&x| x == m).unwrap_or(usize::MAX);
        runs.sort_by_key(|r| (r.seed, order(r.method)));
        let summary = spec
            .methods
            .iter()
            .map(|&method| {
                let sets: Vec<MetricSet> = runs
                    .iter()
                    .filter(|r| r.method == method)
                    .filter_map(|r| match &r.outcome {
                        RunOutcome::Ok { metrics, .. } => Some(*metrics),
                        RunOutcome::Failed { .. } => None,
                    })
                    .collect();
                let failed_runs = runs.iter().filter(|r| r.method == method).count() - sets.len();
                let metrics = if sets.is_empty() {
                    Vec::new()
                } else {
                    MetricSet::NAMES
                        .iter()
                        .enumerate()
                        .map(|(i, name)| {
                            let xs: Vec<f64> = sets.iter().map(|s| s.values()[i]).collect();
                            let (mean, std) = mean_std(&xs);
                            MetricStat { name: name.to_string(), mean, std }
                        })
                        .collect()
                };
                MethodSummary { method, ok_runs: sets.len(), failed_runs, single_run: sets.len() == 1, metrics }
            })
            .collect();
        Self { schema_version: SCHEMA_VERSION, dataset, spec: spec.clone(), seeds: spec.seeds(), summary, runs }
    }

    pub fn method(&self, method: Method) -> Option<&MethodSummary> {
        self.summary.iter().find(|s| s.method == method)
    }

    pub fn all_ok(&self) -> bool {
        self.runs.iter().all(|r| matches!(r.outcome, RunOutcome::Ok { .. }))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

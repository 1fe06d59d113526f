use std::borrow::Cow;
use std::path::Path;
use std::time::Instant;

use ips2::cluster::PipelineOutput;
use ips2::{run_method, Dataset, Method, MetricSet};
use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::dump::{histogram, write_histogram, write_matrix};
use crate::error::{io_err, HarnessError, Result};
use crate::gen::dataset_for_run;
use crate::report::{DatasetInfo, MetricsReport, RunOutcome, RunRecord};
use crate::spec::{DataSource, ExperimentSpec};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Timing {
    pub seed: u64,
    pub method: Method,
    pub seconds: f64,
}

#[derive(Debug, Clone)]
pub struct BenchOutcome {
    pub report: MetricsReport,
    pub timings: Vec<Timing>,
    /// `(file stem, matrix)` for the first seed, when dumps were requested.
    pub dumps: Vec<(String, DMatrix<f64>)>,
}

impl BenchOutcome {
    pub fn all_ok(&self) -> bool {
        self.report.all_ok()
    }
}

fn labels_of(d: &Dataset) -> Result<&[usize]> {
    d.labels.as_deref().ok_or_else(|| HarnessError::Usage(format!("dataset '{}' has no labels; metrics need ground truth", d.name)))
}

/// Loads the dataset a spec refers to (the experiment-seed draw for
/// generators).
pub fn load_spec_dataset(spec: &ExperimentSpec) -> Result<Dataset> {
    dataset_for_run(&spec.data, spec.seed, spec.seed)
}

fn run_one(method: Method, d: &Dataset, truth: &[usize], spec: &ExperimentSpec, seed: u64) -> (RunRecord, Timing, Option<PipelineOutput>) {
    let start = Instant::now();
    let out = run_method(method, d, &spec.config.with_seed(seed))
        .and_then(|out| MetricSet::compute(&out.result.labels, truth).map(|metrics| (metrics, out)));
    let seconds = start.elapsed().as_secs_f64();
    let (outcome, kept) = match out {
        Ok((metrics, out)) => {
            let diag = &out.result.diagnostics;
            let outcome = RunOutcome::Ok {
                metrics,
                objective: out.result.objective,
                high_order_degenerate: diag.high_order_degenerate,
                embedding_degenerate: diag.embedding_degenerate,
                max_eigen_residual: diag.eigen_residuals.iter().copied().reduce(f64::max),
                warnings: diag.warnings.clone(),
            };
            (outcome, Some(out))
        }
        Err(e) => (RunOutcome::Failed { error: e.to_string() }, None),
    };
    (RunRecord { seed, method, outcome }, Timing { seed, method, seconds }, kept)
}

fn collect_dumps(outputs: Vec<(Method, PipelineOutput)>) -> Vec<(String, DMatrix<f64>)> {
    let mut dumps = Vec::new();
    for (method, out) in outputs {
        for (tag, mat) in [("s", out.s.map(|s| s.into_matrix())), ("v", out.v.map(|v| v.v.into_matrix())), ("u", out.u.map(|u| u.into_matrix()))] {
            if let Some(mat) = mat {
                dumps.push((format!("{method}_{tag}"), mat));
            }
        }
    }
    dumps
}

/// Runs every method once per seed. Method failures are recorded in the
/// report; only an unusable spec or dataset is an error.
pub fn run_bench(spec: &ExperimentSpec) -> Result<BenchOutcome> {
    spec.validate()?;
    let resample = matches!(spec.data, DataSource::Generator { resample_per_run: true, .. });
    let shared = if resample { None } else { Some(load_spec_dataset(spec)?) };
    if let Some(d) = &shared {
        labels_of(d)?;
    }
    let seeds = spec.seeds();
    let per_seed: Vec<_> = seeds
        .par_iter()
        .map(|&seed| -> Result<_> {
            let d = match &shared {
                Some(d) => Cow::Borrowed(d),
                None => Cow::Owned(dataset_for_run(&spec.data, spec.seed, seed)?),
            };
            let truth = labels_of(&d)?;
            let keep = spec.dump && seed == spec.seed;
            let mut records = Vec::new();
            let mut kept = Vec::new();
            for &method in &spec.methods {
                let (rec, t, out) = run_one(method, &d, truth, spec, seed);
                records.push((rec, t));
                if let (true, Some(out)) = (keep, out) {
                    kept.push((method, out));
                }
            }
            Ok((DatasetInfo::of(&d), records, kept))
        })
        .collect::<Result<_>>()?;

    let dataset = per_seed[0].0.clone();
    let mut runs = Vec::new();
    let mut timings = Vec::new();
    let mut dumps = Vec::new();
    for (_, records, kept) in per_seed {
        for (rec, t) in records {
            runs.push(rec);
            timings.push(t);
        }
        if !kept.is_empty() {
            dumps = collect_dumps(kept);
        }
    }
    Ok(BenchOutcome { report: MetricsReport::assemble(spec, dataset, runs), timings, dumps })
}

pub(crate) fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(io_err(path))
}

/// Writes `report.json`, `spec.json`, `timings.json` and, if present, the
/// dumps under `dumps/` into `dir`.
pub fn write_bench(outcome: &BenchOutcome, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    write_text(&dir.join("report.json"), &outcome.report.to_json())?;
    write_text(&dir.join("spec.json"), &outcome.report.spec.to_json())?;
    let timings = serde_json::to_string_pretty(&outcome.timings).expect("timings serialize") + "\n";
    write_text(&dir.join("timings.json"), &timings)?;
    if !outcome.dumps.is_empty() {
        let dumps = dir.join("dumps");
        std::fs::create_dir_all(&dumps).map_err(io_err(&dumps))?;
        for (stem, mat) in &outcome.dumps {
            write_matrix(mat, &dumps.join(format!("{stem}.csv")))?;
            write_histogram(&histogram(mat), &dumps.join(format!("{stem}_hist.csv")))?;
        }
    }
    Ok(())
}

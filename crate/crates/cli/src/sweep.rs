use std::path::Path;

use ips2::Method;
use serde::{Deserialize, Serialize};

use crate::bench::{run_bench, write_bench, write_text, BenchOutcome};
use crate::error::{io_err, HarnessError, Result};
use crate::spec::{DataSource, ExperimentSpec, GeneratorSpec};

/// Generator parameter varied by a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    /// Feature dimension of any generator.
    Dim,
    /// White-noise std of usdata1, cluster std of gaussian.
    Level,
    /// Size of the third usdata2 cluster.
    N3,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            Self::Dim => "dim",
            Self::Level => "level",
            Self::N3 => "n3",
        }
    }

    fn apply(self, g: &GeneratorSpec, value: f64) -> Result<GeneratorSpec> {
        let count = || {
            if value >= 0.0 && value.fract() == 0.0 {
                Ok(value as usize)
            } else {
                Err(HarnessError::Usage(format!("{} must be a non-negative integer, got {value}", self.name())))
            }
        };
        let mut g = g.clone();
        match (self, &mut g) {
            (Self::Dim, GeneratorSpec::Usdata1 { dim, .. } | GeneratorSpec::Usdata2 { dim, .. } | GeneratorSpec::Gaussian { dim, .. }) => *dim = count()?,
            (Self::Level, GeneratorSpec::Usdata1 { noise_std, .. }) => *noise_std = value,
            (Self::Level, GeneratorSpec::Gaussian { std, .. }) => *std = value,
            (Self::N3, GeneratorSpec::Usdata2 { n3, .. }) => *n3 = count()?,
            _ => return Err(HarnessError::Usage(format!("generator has no '{}' parameter", self.name()))),
        }
        Ok(g)
    }
}

/// Mean ACC per method at one sweep point; `None` for methods not run or
/// without a successful run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub value: f64,
    pub sc: Option<f64>,
    pub ppc: Option<f64>,
    pub ips2: Option<f64>,
}

impl SweepRow {
    fn of(value: f64, outcome: &BenchOutcome) -> Self {
        let acc = |m| outcome.report.method(m).and_then(|s| s.mean("acc"));
        Self { value, sc: acc(Method::Sc), ppc: acc(Method::Ppc), ips2: acc(Method::Ips2) }
    }

    /// IPS2 minus SC.
    pub fn gain(&self) -> Option<f64> {
        Some(self.ips2? - self.sc?)
    }
}

/// The benchmark spec of one sweep point.
pub fn point_spec(base: &ExperimentSpec, param: SweepParam, value: f64) -> Result<ExperimentSpec> {
    let mut spec = base.clone();
    match &mut spec.data {
        DataSource::Generator { generator, .. } => *generator = param.apply(generator, value)?,
        DataSource::Csv { .. } => return Err(HarnessError::Usage("sweeps need a generator data source".into())),
    }
    Ok(spec)
}

/// Runs a benchmark at every value, in order.
pub fn run_sweep(base: &ExperimentSpec, param: SweepParam, values: &[f64]) -> Result<Vec<(SweepRow, BenchOutcome)>> {
    if values.is_empty() {
        return Err(HarnessError::Usage("sweep needs at least one value".into()));
    }
    let specs = values.iter().map(|&v| point_spec(base, param, v)).collect::<Result<Vec<_>>>()?;
    specs.iter().zip(values).map(|(spec, &v)| run_bench(spec).map(|o| (SweepRow::of(v, &o), o))).collect()
}

/// CSV with columns `<param>, sc, ppc, ips2, gain`; missing values are empty.
pub fn sweep_table(param: SweepParam, rows: &[SweepRow]) -> String {
    let cell = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
    let mut out = format!("{},sc,ppc,ips2,gain\n", param.name());
    for r in rows {
        out.push_str(&format!("{},{},{},{},{}\n", r.value, cell(r.sc), cell(r.ppc), cell(r.ips2), cell(r.gain())));
    }
    out
}

/// Writes `sweep.csv` and one benchmark directory per point into `dir`.
pub fn write_sweep(param: SweepParam, points: &[(SweepRow, BenchOutcome)], dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    for (row, outcome) in points {
        write_bench(outcome, &dir.join(format!("{}_{}", param.name(), row.value)))?;
    }
    let rows: Vec<SweepRow> = points.iter().map(|(r, _)| r.clone()).collect();
    write_text(&dir.join("sweep.csv"), &sweep_table(param, &rows))
}

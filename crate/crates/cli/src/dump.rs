use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{io_err, HarnessError, Result};

pub const HISTOGRAM_BINS: usize = 50;

/// Counts of the strictly upper-triangular entries of `a` in
/// [`HISTOGRAM_BINS`] equal-width bins over [0, 1]. The last bin is closed;
/// values outside [0, 1] are clamped into the end bins.
pub fn histogram(a: &DMatrix<f64>) -> Vec<u64> {
    let mut counts = vec![0u64; HISTOGRAM_BINS];
    let n = a.nrows();
    for j in 0..n {
        for i in 0..j {
            let x = a[(i, j)].clamp(0.0, 1.0);
            let bin = ((x * HISTOGRAM_BINS as f64) as usize).min(HISTOGRAM_BINS - 1);
            counts[bin] += 1;
        }
    }
    counts
}

fn csv_err(path: &Path) -> impl FnOnce(csv::Error) -> HarnessError + '_ {
    move |e| HarnessError::Io { path: path.to_path_buf(), source: e.into() }
}

pub fn write_matrix(a: &DMatrix<f64>, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    for row in a.row_iter() {
        w.write_record(row.iter().map(|v| v.to_string())).map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

/// Columns `bin_lo, bin_hi, count, frequency`.
pub fn write_histogram(counts: &[u64], path: &Path) -> Result<()> {
    let total: u64 = counts.iter().sum();
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    w.write_record(["bin_lo", "bin_hi", "count", "frequency"]).map_err(csv_err(path))?;
    let width = 1.0 / counts.len() as f64;
    for (b, &c) in counts.iter().enumerate() {
        let freq = if total == 0 { 0.0 } else { c as f64 / total as f64 };
        let rec = [(b as f64 * width).to_string(), ((b + 1) as f64 * width).to_string(), c.to_string(), freq.to_string()];
        w.write_record(&rec).map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

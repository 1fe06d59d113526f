//! Sample/feature matrices with optional ground-truth labels, CSV I/O and
//! column standardization.
//!
//! Rows are samples and columns are features.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Standard deviations below this are treated as zero by [`standardize`].
pub const DEGENERATE_STD: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    /// m x n, one sample per row.
    pub samples: DMatrix<f64>,
    /// Canonical class ids `0..c`, one per sample.
    pub labels: Option<Vec<usize>>,
    pub name: String,
}

impl Dataset {
    pub fn new(samples: DMatrix<f64>, labels: Option<Vec<usize>>, name: impl Into<String>) -> Result<Self> {
        let (m, n) = samples.shape();
        if m < 2 {
            return Err(Error::Size(format!("dataset needs at least 2 samples, got {m}")));
        }
        if n < 1 {
            return Err(Error::Size("dataset needs at least 1 feature".into()));
        }
        if let Some((idx, _)) = samples.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            // column-major storage
            return Err(Error::Domain(format!(
                "non-finite feature at sample {}, feature {}",
                idx % m,
                idx / m
            )));
        }
        let labels = match labels {
            Some(l) => {
                if l.len() != m {
                    return Err(Error::Size(format!("{} labels for {m} samples", l.len())));
                }
                Some(canonicalize_labels(&l))
            }
            None => None,
        };
        Ok(Self { samples, labels, name: name.into() })
    }

    pub fn n_samples(&self) -> usize {
        self.samples.nrows()
    }

    pub fn n_features(&self) -> usize {
        self.samples.ncols()
    }

    /// Number of distinct classes, if labelled.
    pub fn n_classes(&self) -> Option<usize> {
        self.labels
            .as_ref()
            .map(|l| l.iter().copied().max().map_or(0, |x| x + 1))
    }

    /// Reorders samples so that new sample `r` is old sample `perm[r]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let m = self.n_samples();
        let mut seen = vec![false; m];
        if perm.len() != m || perm.iter().any(|&p| p >= m || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::Parameter("not a permutation of the sample indices".into()));
        }
        let samples = DMatrix::from_fn(m, self.n_features(), |r, c| self.samples[(perm[r], c)]);
        let labels = self.labels.as_ref().map(|l| perm.iter().map(|&p| l[p]).collect());
        Ok(Self { samples, labels, name: self.name.clone() })
    }
}

/// Maps arbitrary ids to `0..c` in order of first appearance.
pub fn canonicalize_labels<T: Eq + std::hash::Hash + Clone>(raw: &[T]) -> Vec<usize> {
    let mut ids: HashMap<T, usize> = HashMap::new();
    raw.iter()
        .map(|x| {
            let next = ids.len();
            *ids.entry(x.clone()).or_insert(next)
        })
        .collect()
}

/// Which CSV column carries the ground-truth labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LabelColumn {
    /// Header name; requires a header row.
    Name(String),
    /// 0-based column index.
    Index(usize),
}

impl std::str::FromStr for LabelColumn {
    type Err = std::convert::Infallible;

    /// Digits select an index, anything else a header name.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(match s.parse::<usize>() {
            Ok(i) => LabelColumn::Index(i),
            Err(_) => LabelColumn::Name(s.to_string()),
        })
    }
}

/// Loads a comma-separated file of decimal reals.
///
/// Row and column numbers in errors are 0-based and count data rows only
/// (the header, if any, is not row 0).
pub fn load_csv(path: impl AsRef<Path>, label_column: Option<&LabelColumn>, has_header: bool) -> Result<Dataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(has_header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(file);

    let label_idx = match label_column {
        None => None,
        Some(LabelColumn::Index(i)) => Some(*i),
        Some(LabelColumn::Name(name)) => {
            if !has_header {
                return Err(Error::Parameter(format!(
                    "label column '{name}' selected by name but the file has no header"
                )));
            }
            let headers = reader.headers().map_err(|e| csv_error(0, e))?;
            Some(headers.iter().position(|h| h == name).ok_or_else(|| {
                Error::Parameter(format!("label column '{name}' not found in header"))
            })?)
        }
    };

    let mut width: Option<usize> = None;
    let mut values: Vec<f64> = Vec::new();
    let mut raw_labels: Vec<String> = Vec::new();
    let mut rows = 0usize;
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| csv_error(row, e))?;
        let w = *width.get_or_insert(record.len());
        if record.len() != w {
            return Err(Error::Parse {
                row,
                col: None,
                msg: format!("expected {w} columns, found {}", record.len()),
            });
        }
        if let Some(li) = label_idx {
            if li >= w {
                return Err(Error::Parameter(format!("label column {li} out of range for {w} columns")));
            }
        }
        for (col, cell) in record.iter().enumerate() {
            if Some(col) == label_idx {
                raw_labels.push(cell.to_string());
                continue;
            }
            let v: f64 = cell.parse().map_err(|_| Error::Parse {
                row,
                col: Some(col),
                msg: format!("'{cell}' is not a number"),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse { row, col: Some(col), msg: format!("'{cell}' is not finite") });
            }
            values.push(v);
        }
        rows += 1;
    }

    if rows < 2 {
        return Err(Error::Size(format!("dataset needs at least 2 samples, got {rows}")));
    }
    let n = values.len() / rows;
    let samples = DMatrix::from_row_slice(rows, n, &values);
    let labels = label_idx.map(|_| canonicalize_labels(&raw_labels));
    let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    Dataset::new(samples, labels, name)
}

fn csv_error(row: usize, e: csv::Error) -> Error {
    Error::Parse { row, col: None, msg: e.to_string() }
}

/// Writes features as `f0..f{n-1}` columns plus a trailing `label` column
/// when labels are present. Values use the shortest representation that
/// parses back to the same `f64`.
pub fn write_csv(d: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let io_err = |source| Error::Io { path: path.to_path_buf(), source };
    let file = File::create(path).map_err(io_err)?;
    let mut w = BufWriter::new(file);
    write_csv_to(d, &mut w).map_err(io_err)?;
    w.flush().map_err(io_err)
}

pub fn write_csv_to<W: Write>(d: &Dataset, w: &mut W) -> std::io::Result<()> {
    let n = d.n_features();
    let mut header: Vec<String> = (0..n).map(|j| format!("f{j}")).collect();
    if d.labels.is_some() {
        header.push("label".into());
    }
    writeln!(w, "{}", header.join(","))?;
    let mut line = String::new();
    for i in 0..d.n_samples() {
        line.clear();
        for j in 0..n {
            if j > 0 {
                line.push(',');
            }
            line.push_str(&format!("{:?}", d.samples[(i, j)]));
        }
        if let Some(labels) = &d.labels {
            line.push_str(&format!(",{}", labels[i]));
        }
        writeln!(w, "{line}")?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Standardize {
    #[default]
    None,
    /// Per-column mean 0 and sample standard deviation 1.
    Zscore,
}

/// Column standardization. Columns whose sample std is below
/// [`DEGENERATE_STD`] are only centered.
pub fn standardize(d: &Dataset, mode: Standardize) -> Dataset {
    match mode {
        Standardize::None => d.clone(),
        Standardize::Zscore => {
            let m = d.n_samples();
            let mut samples = d.samples.clone();
            for mut col in samples.column_iter_mut() {
                let mean = col.iter().sum::<f64>() / m as f64;
                let var = col.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1) as f64;
                let std = var.sqrt();
                for x in col.iter_mut() {
                    *x -= mean;
                    if std >= DEGENERATE_STD {
                        *x /= std;
                    }
                }
            }
            Dataset { samples, labels: d.labels.clone(), name: d.name.clone() }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_tmp(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn loads_plain_numeric_csv() {
        let f = write_tmp("1,2\n3,4\n5,6\n");
        let d = load_csv(f.path(), None, false).unwrap();
        assert_eq!(d.samples.shape(), (3, 2));
        assert_eq!(d.samples[(2, 1)], 6.0);
        assert!(d.labels.is_none());
    }

    #[test]
    fn label_column_is_canonicalized_by_first_appearance() {
        let f = write_tmp("x,y,class\n1,2,a\n3,4,a\n5,6,b\n");
        let d = load_csv(f.path(), Some(&LabelColumn::Name("class".into())), true).unwrap();
        assert_eq!(d.labels, Some(vec![0, 0, 1]));
        assert_eq!(d.n_features(), 2);

        let f = write_tmp("b,1,2\nz,3,4\nb,5,6\n");
        let d = load_csv(f.path(), Some(&LabelColumn::Index(0)), false).unwrap();
        assert_eq!(d.labels, Some(vec![0, 1, 0]));
        assert_eq!(d.samples[(0, 0)], 1.0);
    }

    #[test]
    fn non_numeric_cell_names_row_and_column() {
        let f = write_tmp("1,2\n3,x\n5,6\n");
        match load_csv(f.path(), None, false) {
            Err(Error::Parse { row: 1, col: Some(1), .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn ragged_rows_are_rejected_with_row_index() {
        let f = write_tmp("1,2\n3,4,5\n");
        match load_csv(f.path(), None, false) {
            Err(Error::Parse { row: 1, col: None, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn single_row_is_a_size_error() {
        let f = write_tmp("1,2\n");
        assert!(matches!(load_csv(f.path(), None, false), Err(Error::Size(_))));
    }

    #[test]
    fn label_by_name_needs_header() {
        let f = write_tmp("1,2\n3,4\n");
        assert!(matches!(
            load_csv(f.path(), Some(&LabelColumn::Name("c".into())), false),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn zscore_column() {
        let d = Dataset::new(DMatrix::from_column_slice(3, 2, &[1.0, 2.0, 3.0, 5.0, 5.0, 5.0]), None, "t").unwrap();
        let z = standardize(&d, Standardize::Zscore);
        let col: Vec<f64> = z.samples.column(0).iter().copied().collect();
        assert!((col.iter().sum::<f64>()).abs() < 1e-15);
        let var = col.iter().map(|x| x * x).sum::<f64>() / 2.0;
        assert!((var - 1.0).abs() < 1e-12);
        assert!(z.samples.column(1).iter().all(|&x| x == 0.0));
        assert_eq!(standardize(&d, Standardize::None), d);
    }

    #[test]
    fn permuted_rejects_non_permutations() {
        let d = Dataset::new(DMatrix::zeros(3, 1), None, "t").unwrap();
        assert!(d.permuted(&[0, 0, 1]).is_err());
        assert!(d.permuted(&[2, 0, 1]).is_ok());
    }
}

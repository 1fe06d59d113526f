//! Coordinate-list storage for sparse symmetric matrices.
//!
//! Only the upper triangle and the diagonal are stored; the lower triangle
//! is implied by symmetry.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SparseSymMatrix {
    dim: usize,
    // sorted by (row, col), row <= col, no duplicates
    rows: Vec<u32>,
    cols: Vec<u32>,
    vals: Vec<f64>,
}

impl SparseSymMatrix {
    /// Builds from triplets in any orientation; `(r, c)` and `(c, r)` name the
    /// same logical entry, so supplying both is a duplicate.
    pub fn from_triplets(dim: usize, triplets: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        if dim > u32::MAX as usize {
            return Err(Error::Size(format!("dimension {dim} exceeds u32 indexing")));
        }
        let mut t: Vec<(u32, u32, f64)> = Vec::new();
        for (r, c, v) in triplets {
            if r >= dim || c >= dim {
                return Err(Error::Index(format!("entry ({r}, {c}) outside dimension {dim}")));
            }
            if !v.is_finite() {
                return Err(Error::Domain(format!("non-finite value at ({r}, {c})")));
            }
            let (a, b) = if r <= c { (r, c) } else { (c, r) };
            t.push((a as u32, b as u32, v));
        }
        t.sort_by_key(|&(r, c, _)| (r, c));
        if let Some(w) = t.windows(2).find(|w| (w[0].0, w[0].1) == (w[1].0, w[1].1)) {
            return Err(Error::Domain(format!("duplicate entry ({}, {})", w[0].0, w[0].1)));
        }
        let mut out = Self { dim, rows: Vec::with_capacity(t.len()), cols: Vec::with_capacity(t.len()), vals: Vec::with_capacity(t.len()) };
        for (r, c, v) in t {
            out.rows.push(r);
            out.cols.push(c);
            out.vals.push(v);
        }
        Ok(out)
    }

    /// Assembles from parts already sorted by `(row, col)` with `row <= col`.
    pub(crate) fn from_sorted_upper(dim: usize, rows: Vec<u32>, cols: Vec<u32>, vals: Vec<f64>) -> Self {
        debug_assert!(rows.len() == cols.len() && cols.len() == vals.len());
        debug_assert!(rows.iter().zip(&cols).all(|(r, c)| r <= c));
        debug_assert!(rows
            .iter()
            .zip(&cols)
            .zip(rows.iter().zip(&cols).skip(1))
            .all(|(a, b)| a < b));
        Self { dim, rows, cols, vals }
    }

    /// Upper triangle of a dense matrix, skipping exact zeros.
    pub fn from_dense(a: &DMatrix<f64>) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(Error::Size(format!("matrix must be square, got {:?}", a.shape())));
        }
        let mut trips = Vec::new();
        for r in 0..n {
            for c in r..n {
                if a[(r, c)] != 0.0 {
                    trips.push((r, c, a[(r, c)]));
                }
            }
        }
        Self::from_triplets(n, trips)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of stored (upper + diagonal) entries.
    pub fn nnz_stored(&self) -> usize {
        self.vals.len()
    }

    /// Number of nonzero positions in the full symmetric matrix.
    pub fn nnz_logical(&self) -> usize {
        self.rows.iter().zip(&self.cols).map(|(r, c)| if r == c { 1 } else { 2 }).sum()
    }

    /// Stored entries as `(row, col, value)` with `row <= col`.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.rows
            .iter()
            .zip(&self.cols)
            .zip(&self.vals)
            .map(|((&r, &c), &v)| (r as usize, c as usize, v))
    }

    fn position(&self, r: usize, c: usize) -> Option<usize> {
        let (a, b) = if r <= c { (r as u32, c as u32) } else { (c as u32, r as u32) };
        let lo = self.rows.partition_point(|&x| x < a);
        let hi = self.rows.partition_point(|&x| x <= a);
        self.cols[lo..hi].binary_search(&b).ok().map(|p| lo + p)
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.position(r, c).map_or(0.0, |p| self.vals[p])
    }

    /// Whether `(r, c)` is part of the stored pattern, even if its value is 0.
    pub fn is_stored(&self, r: usize, c: usize) -> bool {
        self.position(r, c).is_some()
    }

    /// `y = A x`.
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.dim);
        assert_eq!(y.len(), self.dim);
        y.fill(0.0);
        for ((&r, &c), &v) in self.rows.iter().zip(&self.cols).zip(&self.vals) {
            let (r, c) = (r as usize, c as usize);
            y[r] += v * x[c];
            if r != c {
                y[c] += v * x[r];
            }
        }
    }

    pub fn row_sums(&self) -> Vec<f64> {
        let mut s = vec![0.0; self.dim];
        for (r, c, v) in self.iter() {
            s[r] += v;
            if r != c {
                s[c] += v;
            }
        }
        s
    }

    pub fn max_abs_row_sum(&self) -> f64 {
        let mut s = vec![0.0f64; self.dim];
        for (r, c, v) in self.iter() {
            s[r] += v.abs();
            if r != c {
                s[c] += v.abs();
            }
        }
        s.into_iter().fold(0.0, f64::max)
    }

    pub fn min_value(&self) -> Option<f64> {
        self.vals.iter().copied().reduce(f64::min)
    }

    /// Entry `(r, c)` becomes `a[r, c] / sqrt(deg[r] * deg[c])`; the pattern
    /// is kept.
    pub fn divide_by_degrees(&self, deg: &[f64]) -> Self {
        assert_eq!(deg.len(), self.dim);
        let vals = self.iter().map(|(r, c, v)| v / (deg[r] * deg[c]).sqrt()).collect();
        Self { dim: self.dim, rows: self.rows.clone(), cols: self.cols.clone(), vals }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut a = DMatrix::zeros(self.dim, self.dim);
        for (r, c, v) in self.iter() {
            a[(r, c)] = v;
            a[(c, r)] = v;
        }
        a
    }

    /// Connected components of the graph whose edges are the nonzero
    /// entries. Component ids are numbered by their smallest vertex.
    pub fn connected_components(&self) -> (Vec<usize>, usize) {
        let mut parent: Vec<usize> = (0..self.dim).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for (r, c, v) in self.iter() {
            if v != 0.0 && r != c {
                let (a, b) = (find(&mut parent, r), find(&mut parent, c));
                if a != b {
                    // smaller root wins so ids stay order-stable
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
        let mut ids = vec![usize::MAX; self.dim];
        let mut count = 0;
        let out = (0..self.dim)
            .map(|x| {
                let root = find(&mut parent, x);
                if ids[root] == usize::MAX {
                    ids[root] = count;
                    count += 1;
                }
                ids[root]
            })
            .collect();
        (out, count)
    }

    /// Coordinate CSV: a `dim,<n>` line followed by `row,col,value` lines
    /// (0-based, upper triangle).
    pub fn write_coo_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let io_err = |source| Error::Io { path: path.to_path_buf(), source };
        let mut w = BufWriter::new(File::create(path).map_err(io_err)?);
        writeln!(w, "dim,{}", self.dim).map_err(io_err)?;
        for (r, c, v) in self.iter() {
            writeln!(w, "{r},{c},{v:?}").map_err(io_err)?;
        }
        w.flush().map_err(io_err)
    }

    pub fn read_coo_csv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let io_err = |source| Error::Io { path: path.to_path_buf(), source };
        let reader = BufReader::new(File::open(path).map_err(io_err)?);
        let mut lines = reader.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse { row: 0, col: None, msg: "empty file".into() })?
            .map_err(io_err)?;
        let dim: usize = header
            .strip_prefix("dim,")
            .and_then(|d| d.trim().parse().ok())
            .ok_or_else(|| Error::Parse { row: 0, col: None, msg: format!("bad header '{header}'") })?;
        let mut trips = Vec::new();
        for (row, line) in lines.enumerate() {
            let line = line.map_err(io_err)?;
            let cells: Vec<&str> = line.split(',').collect();
            if cells.len() != 3 {
                return Err(Error::Parse { row, col: None, msg: "expected row,col,value".into() });
            }
            let parse_idx = |col: usize| {
                cells[col].trim().parse::<usize>().map_err(|_| Error::Parse { row, col: Some(col), msg: "bad index".into() })
            };
            let v: f64 = cells[2]
                .trim()
                .parse()
                .map_err(|_| Error::Parse { row, col: Some(2), msg: "bad value".into() })?;
            trips.push((parse_idx(0)?, parse_idx(1)?, v));
        }
        Self::from_triplets(dim, trips)
    }
}

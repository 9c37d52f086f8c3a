//! Dense column-major matrix used for designs, factors and blocks.

use std::fmt;
use std::io::{Read, Write};
use std::ops::{Index, IndexMut};
use std::path::Path;

use crate::error::{Error, Result};

/// Column-major dense matrix of `f64`.
///
/// Indices are 0-based in code. Documentation elsewhere uses 1-based
/// positions for update locations (row `k`, column `k`).
#[derive(Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for j in 0..cols {
            for i in 0..rows {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds from row-major values.
    pub fn from_row_slice(rows: usize, cols: usize, vals: &[f64]) -> Self {
        assert_eq!(vals.len(), rows * cols, "from_row_slice: wrong length");
        Self::from_fn(rows, cols, |i, j| vals[i * cols + j])
    }

    /// Builds from column-major values.
    pub fn from_col_slice(rows: usize, cols: usize, vals: &[f64]) -> Self {
        assert_eq!(vals.len(), rows * cols, "from_col_slice: wrong length");
        Self {
            rows,
            cols,
            data: vals.to_vec(),
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self::from_fn(r, c, |i, j| rows[i][j])
    }

    pub fn column_vector(v: &[f64]) -> Self {
        Self::from_col_slice(v.len(), 1, v)
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn col(&self, j: usize) -> &[f64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn col_mut(&mut self, j: usize) -> &mut [f64] {
        let r = self.rows;
        &mut self.data[j * r..(j + 1) * r]
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        (0..self.cols).map(|j| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "matmul: inner dimensions differ");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for j in 0..rhs.cols {
            for l in 0..self.cols {
                let b = rhs[(l, j)];
                if b == 0.0 {
                    continue;
                }
                let a = self.col(l);
                let o = out.col_mut(j);
                for i in 0..a.len() {
                    o[i] += a[i] * b;
                }
            }
        }
        out
    }

    /// `selfᵀ · rhs` without forming the transpose.
    pub fn t_matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.rows, rhs.rows, "t_matmul: row counts differ");
        Self::from_fn(self.cols, rhs.cols, |i, j| dot(self.col(i), rhs.col(j)))
    }

    pub fn mat_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, v.len());
        let mut out = vec![0.0; self.rows];
        for (j, &vj) in v.iter().enumerate() {
            for (o, a) in out.iter_mut().zip(self.col(j)) {
                *o += a * vj;
            }
        }
        out
    }

    pub fn t_mat_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.rows, v.len());
        (0..self.cols).map(|j| dot(self.col(j), v)).collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!(self.shape(), rhs.shape(), "sub: shapes differ");
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!(self.shape(), rhs.shape(), "add: shapes differ");
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * s).collect(),
        }
    }

    /// Copy of the half-open block `[r0, r1) × [c0, c1)`.
    pub fn submatrix(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Self {
        assert!(r0 <= r1 && r1 <= self.rows && c0 <= c1 && c1 <= self.cols);
        Self::from_fn(r1 - r0, c1 - c0, |i, j| self[(r0 + i, c0 + j)])
    }

    pub fn select_cols(&self, idx: &[usize]) -> Self {
        let mut data = Vec::with_capacity(self.rows * idx.len());
        for &j in idx {
            data.extend_from_slice(self.col(j));
        }
        Self {
            rows: self.rows,
            cols: idx.len(),
            data,
        }
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        Self::from_fn(idx.len(), self.cols, |i, j| self[(idx[i], j)])
    }

    /// Inserts `block` so that its first row lands at 0-based row `at`.
    pub fn insert_rows(&self, at: usize, block: &Self) -> Self {
        assert!(at <= self.rows);
        assert_eq!(block.cols, self.cols);
        let m = block.rows;
        Self::from_fn(self.rows + m, self.cols, |i, j| {
            if i < at {
                self[(i, j)]
            } else if i < at + m {
                block[(i - at, j)]
            } else {
                self[(i - m, j)]
            }
        })
    }

    pub fn remove_rows(&self, at: usize, m: usize) -> Self {
        assert!(at + m <= self.rows);
        Self::from_fn(self.rows - m, self.cols, |i, j| {
            if i < at {
                self[(i, j)]
            } else {
                self[(i + m, j)]
            }
        })
    }

    /// Inserts `block` so that its first column lands at 0-based column `at`.
    pub fn insert_cols(&self, at: usize, block: &Self) -> Self {
        assert!(at <= self.cols);
        assert_eq!(block.rows, self.rows);
        let mut data = Vec::with_capacity(self.rows * (self.cols + block.cols));
        data.extend_from_slice(&self.data[..at * self.rows]);
        data.extend_from_slice(&block.data);
        data.extend_from_slice(&self.data[at * self.rows..]);
        Self {
            rows: self.rows,
            cols: self.cols + block.cols,
            data,
        }
    }

    pub fn remove_cols(&self, at: usize, m: usize) -> Self {
        assert!(at + m <= self.cols);
        let mut data = Vec::with_capacity(self.rows * (self.cols - m));
        data.extend_from_slice(&self.data[..at * self.rows]);
        data.extend_from_slice(&self.data[(at + m) * self.rows..]);
        Self {
            rows: self.rows,
            cols: self.cols - m,
            data,
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(a * self.rows + i, b * self.rows + i);
        }
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    /// Largest magnitude strictly below the diagonal.
    pub fn max_below_diagonal(&self) -> f64 {
        let mut worst = 0.0f64;
        for j in 0..self.cols {
            for i in (j + 1)..self.rows {
                worst = worst.max(self[(i, j)].abs());
            }
        }
        worst
    }

    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self> {
        let f = std::fs::File::open(path.as_ref()).map_err(|e| Error::Io(e.to_string()))?;
        Self::read_csv_from(f)
    }

    /// Parses comma-separated rows with no header.
    pub fn read_csv_from(reader: impl Read) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for rec in rdr.records() {
            let rec = rec.map_err(|e| Error::Parse {
                line: e.position().map_or(0, |p| p.line() as usize),
                column: 0,
                message: e.to_string(),
            })?;
            let line = rec.position().map_or(rows.len() + 1, |p| p.line() as usize);
            if rec.len() == 1 && rec[0].is_empty() {
                continue;
            }
            let mut row = Vec::with_capacity(rec.len());
            for (c, field) in rec.iter().enumerate() {
                let v: f64 = field.parse().map_err(|_| Error::Parse {
                    line,
                    column: c + 1,
                    message: format!("not a number: {field:?}"),
                })?;
                if !v.is_finite() {
                    return Err(Error::Parse {
                        line,
                        column: c + 1,
                        message: format!("non-finite value {field:?}"),
                    });
                }
                row.push(v);
            }
            if let Some(first) = rows.first() {
                if first.len() != row.len() {
                    return Err(Error::Parse {
                        line,
                        column: row.len().min(first.len()) + 1,
                        message: format!("expected {} fields, found {}", first.len(), row.len()),
                    });
                }
            }
            rows.push(row);
        }
        if rows.is_empty() {
            return Err(Error::Parse {
                line: 1,
                column: 1,
                message: "empty matrix".into(),
            });
        }
        Ok(Self::from_rows(&rows))
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let f = std::fs::File::create(path.as_ref()).map_err(|e| Error::Io(e.to_string()))?;
        self.write_csv_to(std::io::BufWriter::new(f))
    }

    /// Writes with 17 significant digits so values round-trip exactly.
    pub fn write_csv_to(&self, mut w: impl Write) -> Result<()> {
        let io = |e: std::io::Error| Error::Io(e.to_string());
        for i in 0..self.rows {
            let line: Vec<String> = (0..self.cols).map(|j| format!("{:.16e}", self[(i, j)])).collect();
            writeln!(w, "{}", line.join(",")).map_err(io)?;
        }
        w.flush().map_err(io)
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = f64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[j * self.rows + i]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[j * self.rows + i]
    }
}

impl fmt::Debug for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "DenseMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| format!("{:>12.6}", self[(i, j)])).collect();
            writeln!(f, "  {}", row.join(" "))?;
        }
        write!(f, "]")
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Relative Frobenius distance `‖a − b‖ / max(‖b‖, tiny)`.
pub fn rel_diff(a: &DenseMatrix, b: &DenseMatrix) -> f64 {
    let d = a.sub(b).frobenius_norm();
    d / b.frobenius_norm().max(f64::MIN_POSITIVE)
}

/// Flips the sign of each row of `r` so its diagonal is nonnegative.
///
/// Triangular factors are unique only up to these row signs, so this puts
/// two factors of the same matrix in a comparable form.
pub fn normalize_row_signs(r: &DenseMatrix) -> DenseMatrix {
    let mut out = r.clone();
    for i in 0..r.nrows().min(r.ncols()) {
        if r[(i, i)] < 0.0 {
            for j in 0..r.ncols() {
                out[(i, j)] = -out[(i, j)];
            }
        }
    }
    out
}

/// Relative distance between two triangular factors after sign normalization.
pub fn factor_diff(a: &DenseMatrix, b: &DenseMatrix) -> f64 {
    rel_diff(&normalize_row_signs(a), &normalize_row_signs(b))
}

//! Loading user datasets.

use std::path::Path;

use anyhow::{bail, Context, Result};
use qrkit_bayes::Dataset;
use qrkit_core::DenseMatrix;

#[derive(Clone, Debug, Default)]
pub struct InputOptions {
    /// The first line holds column names.
    pub header: bool,
    /// Prepend a column of ones.
    pub add_intercept: bool,
}

pub struct LoadedData {
    pub data: Dataset,
    /// One name per design column, intercept first.
    pub names: Vec<String>,
}

fn read_table(path: &Path, header: bool) -> Result<(DenseMatrix, Option<Vec<String>>)> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let (names, body, offset) = if header {
        let mut it = text.splitn(2, '\n');
        let first = it.next().unwrap_or_default();
        let names = first.trim().split(',').map(|s| s.trim().to_string()).collect();
        (Some(names), it.next().unwrap_or_default().to_string(), 1)
    } else {
        (None, text, 0)
    };
    let m = DenseMatrix::read_csv_from(body.as_bytes()).map_err(|e| match e {
        qrkit_core::Error::Parse { line, column, message } => {
            anyhow::anyhow!("{}: line {}, column {}: {}", path.display(), line + offset, column, message)
        }
        other => anyhow::Error::new(other),
    })?;
    Ok((m, names))
}

/// Reads `y` from the first column of `data`, or from `response` when given
/// (then every column of `data` is a covariate).
pub fn load(data: &Path, response: Option<&Path>, opts: &InputOptions) -> Result<LoadedData> {
    let (table, header) = read_table(data, opts.header)?;
    let (y, x, mut names) = match response {
        Some(rpath) => {
            let (ym, _) = read_table(rpath, opts.header)?;
            if ym.ncols() != 1 {
                bail!("{}: response file must have one column, found {}", rpath.display(), ym.ncols());
            }
            let names = header.unwrap_or_else(|| (1..=table.ncols()).map(|j| format!("x{j}")).collect());
            (ym.col(0).to_vec(), table, names)
        }
        None => {
            if table.ncols() < 2 {
                bail!("{}: need the response and at least one covariate column", data.display());
            }
            let names = match header {
                Some(h) => h[1..].to_vec(),
                None => (1..table.ncols()).map(|j| format!("x{j}")).collect(),
            };
            let x = table.submatrix(0, table.nrows(), 1, table.ncols());
            (table.col(0).to_vec(), x, names)
        }
    };
    if names.len() != x.ncols() {
        bail!("header has {} names for {} covariate columns", names.len(), x.ncols());
    }
    let x = if opts.add_intercept {
        names.insert(0, "intercept".into());
        x.insert_cols(0, &DenseMatrix::from_fn(x.nrows(), 1, |_, _| 1.0))
    } else {
        x
    };
    if y.len() != x.nrows() {
        bail!("response has {} rows but the design has {}", y.len(), x.nrows());
    }
    Ok(LoadedData { data: Dataset::new(x, y)?, names })
}

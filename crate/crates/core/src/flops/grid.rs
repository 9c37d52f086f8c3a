//! Measured-versus-predicted cost tables.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::model::{predict_cost, CostQuery, Operation};
use super::{counted, FlopCounter};
use crate::error::Result;
use crate::linalg::{QrFactors, RFactor};
use crate::matrix::DenseMatrix;

/// Largest `N` for which [`cost_grid`] runs the instrumented operation.
pub const MEASURE_LIMIT: usize = 2000;

#[derive(Clone, Debug, PartialEq)]
pub struct CostRow {
    pub query: CostQuery,
    pub predicted: u64,
    pub measured: Option<u64>,
}

fn uniform(rng: &mut ChaCha8Rng, rows: usize, cols: usize, scale: f64) -> DenseMatrix {
    DenseMatrix::from_fn(rows, cols, |_, _| scale * rng.gen_range(-1.0..1.0))
}

/// Well-conditioned upper-trapezoidal `rows × p` block. Off-diagonal
/// entries shrink with `p` so the condition number stays bounded; random
/// triangular matrices are otherwise exponentially ill-conditioned.
fn upper(rng: &mut ChaCha8Rng, rows: usize, p: usize) -> DenseMatrix {
    let off = 0.5 / p as f64;
    DenseMatrix::from_fn(rows, p, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Less => rng.gen_range(-off..off),
        std::cmp::Ordering::Equal => rng.gen_range(1.0..2.0),
        std::cmp::Ordering::Greater => 0.0,
    })
}

/// Runs the instrumented operation on random data shaped by `q`.
///
/// Counts do not depend on the data, so the inputs are synthetic rather
/// than genuine factorizations.
pub fn measure_cost(q: &CostQuery, seed: u64) -> Result<u64> {
    use Operation::*;
    q.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (n, p, m, k) = (q.n, q.p, q.m, q.k);
    let fc: FlopCounter = if q.operation.is_r() {
        let r1 = RFactor::from_upper(upper(&mut rng, p, p));
        match q.operation {
            RAddRow | RAddRowsBlock => counted::r_add_rows(&r1, &uniform(&mut rng, m, p, 1.0))?.1,
            RDelRow | RDelRowsBlock => counted::r_delete_rows(&r1, &uniform(&mut rng, m, p, 1e-3))?.1,
            RAddCol | RAddColsBlock => {
                // X = [R₁; 0] has Gram matrix R₁ᵀR₁ exactly.
                let x = r1.matrix().insert_rows(p, &DenseMatrix::zeros(n - p, p));
                counted::r_add_cols(&r1, &x, &uniform(&mut rng, n, m, 1.0))?.1
            }
            RDelCol | RDelColsBlock => counted::r_delete_cols(&r1, k, m)?.1,
            RDelColsNonAdj => counted::r_delete_cols_nonadjacent(&r1, q.ks.as_deref().unwrap_or_default())?.1,
            _ => unreachable!(),
        }
    } else {
        let f = QrFactors {
            q: uniform(&mut rng, n, n, 1.0),
            r: upper(&mut rng, n, p),
        };
        match q.operation {
            QrAddRow | QrAddRowsBlock => counted::qr_add_rows(&f, k, &uniform(&mut rng, m, p, 1.0))?.1,
            QrDelRow | QrDelRowsBlock => counted::qr_delete_rows(&f, k, m)?.1,
            QrAddCol | QrAddColsBlock => counted::qr_add_cols(&f, k, &uniform(&mut rng, n, m, 1.0))?.1,
            QrDelCol | QrDelColsBlock => counted::qr_delete_cols(&f, k, m)?.1,
            QrDelColsNonAdj => counted::qr_delete_cols_nonadjacent(&f, q.ks.as_deref().unwrap_or_default())?.1,
            _ => unreachable!(),
        }
    };
    Ok(fc.total())
}

/// Predicted cost for every query, measured where `N ≤ MEASURE_LIMIT`.
pub fn cost_grid(queries: &[CostQuery], seed: u64) -> Result<Vec<CostRow>> {
    queries
        .iter()
        .enumerate()
        .map(|(t, q)| {
            let predicted = predict_cost(q)?;
            let measured = if q.n <= MEASURE_LIMIT {
                Some(measure_cost(q, seed.wrapping_add(t as u64))?)
            } else {
                None
            };
            Ok(CostRow { query: q.clone(), predicted, measured })
        })
        .collect()
}

/// Cost-curve grid: `N = 1000` with varying `p`, and `p = 100` with
/// varying `N`, for row/column additions and deletions of size
/// `m ∈ {1, 5, 10}` on both factorizations.
///
/// Rows are appended at the bottom, columns at the right end, and
/// deletions start at the first row or column.
pub fn figure_grid() -> Vec<CostQuery> {
    use Operation::*;
    let mut shapes: Vec<(usize, usize)> = [20, 50, 100, 200, 500, 800].iter().map(|&p| (1000, p)).collect();
    shapes.extend([200, 500, 800, 1000, 2000, 5000].iter().map(|&n| (n, 100)));
    let mut out = Vec::new();
    for &m in &[1usize, 5, 10] {
        let kinds: [(Operation, Operation); 4] = if m == 1 {
            [(QrAddRow, RAddRow), (QrDelRow, RDelRow), (QrAddCol, RAddCol), (QrDelCol, RDelCol)]
        } else {
            [
                (QrAddRowsBlock, RAddRowsBlock),
                (QrDelRowsBlock, RDelRowsBlock),
                (QrAddColsBlock, RAddColsBlock),
                (QrDelColsBlock, RDelColsBlock),
            ]
        };
        for &(n, p) in &shapes {
            for (qr, r) in kinds {
                let k = match qr {
                    QrAddRow | QrAddRowsBlock => n + 1,
                    QrAddCol | QrAddColsBlock => p + 1,
                    _ => 1,
                };
                out.push(CostQuery::new(qr, n, p, m, k));
                out.push(CostQuery::new(r, n, p, m, k));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_grid_agrees() {
        let qs = vec![
            CostQuery::new(Operation::QrAddRow, 12, 4, 1, 3),
            CostQuery::new(Operation::RDelRowsBlock, 12, 4, 3, 1),
            CostQuery::new(Operation::RAddColsBlock, 12, 4, 3, 5),
        ];
        for row in cost_grid(&qs, 7).unwrap() {
            assert_eq!(Some(row.predicted), row.measured, "{:?}", row.query);
        }
    }

    #[test]
    fn figure_grid_is_valid() {
        let grid = figure_grid();
        assert_eq!(grid.len(), 3 * 12 * 8);
        for q in &grid {
            q.validate().unwrap();
        }
    }
}

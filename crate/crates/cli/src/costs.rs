//! Cost-curve tables.

use std::io::Write;

use anyhow::Result;
use qrkit_core::flops::{cost_grid, figure_grid, CostQuery, CostRow, Operation};

/// Which query set to tabulate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Grid {
    /// `N = 1000` over `p`, and `p = 100` over `N`.
    Figure,
    /// Every operation at small sizes with first, middle, and last positions.
    Small,
}

pub fn small_grid() -> Vec<CostQuery> {
    let mut out = Vec::new();
    for &n in &[16usize, 32, 64] {
        for &p in &[4usize, 8, 12] {
            for op in Operation::ALL {
                if matches!(op, Operation::QrDelColsNonAdj | Operation::RDelColsNonAdj) {
                    continue;
                }
                for &m in &[1usize, 2, 4] {
                    let last = match op.qr_counterpart() {
                        Operation::QrAddRow | Operation::QrAddRowsBlock => n + 1,
                        Operation::QrDelRow | Operation::QrDelRowsBlock => n - m + 1,
                        Operation::QrAddCol | Operation::QrAddColsBlock => p + 1,
                        _ => p - m + 1,
                    };
                    for k in [1, last.div_ceil(2), last] {
                        let q = CostQuery::new(op, n, p, m, k);
                        if q.validate().is_ok() && !out.contains(&q) {
                            out.push(q);
                        }
                    }
                }
            }
        }
    }
    out
}

pub fn run_costs(grid: Grid, seed: u64) -> Result<Vec<CostRow>> {
    let queries = match grid {
        Grid::Figure => figure_grid(),
        Grid::Small => small_grid(),
    };
    Ok(cost_grid(&queries, seed)?)
}

pub const COST_HEADER: [&str; 8] = ["operation", "N", "p", "m", "k", "predicted", "measured", "log10_predicted"];

pub fn write_costs(rows: &[CostRow], w: impl Write) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(COST_HEADER)?;
    for r in rows {
        let q = &r.query;
        out.write_record([
            q.operation.name().to_string(),
            q.n.to_string(),
            q.p.to_string(),
            q.m.to_string(),
            q.k.to_string(),
            r.predicted.to_string(),
            r.measured.map(|m| m.to_string()).unwrap_or_default(),
            format!("{:.17e}", (r.predicted as f64).log10()),
        ])?;
    }
    out.flush()?;
    Ok(())
}

//! Simulation-study tables.

use std::io::Write;

use anyhow::Result;
use qrkit_bayes::simulate::CellResult;

pub const SIM_HEADER: [&str; 15] = [
    "n", "p", "p0", "reps", "auc_mean", "auc_se", "f1_mean", "f1_se", "tpr_mean", "tpr_se", "fdr_mean", "fdr_se",
    "mse_mean", "mse_se", "seconds",
];

pub fn write_simulation(cells: &[CellResult], w: impl Write) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(SIM_HEADER)?;
    for c in cells {
        let mut rec = vec![c.n.to_string(), c.p.to_string(), c.p0.to_string(), c.reps.to_string()];
        for s in [c.auc, c.f1, c.tpr, c.fdr, c.mse] {
            rec.push(s.mean.to_string());
            rec.push(s.se.to_string());
        }
        rec.push(format!("{:.6}", c.seconds));
        out.write_record(&rec)?;
    }
    out.flush()?;
    Ok(())
}

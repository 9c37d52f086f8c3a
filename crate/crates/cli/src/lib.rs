//! Library side of the `qrkit` command: each subcommand is a function
//! returning its table, so tests can drive them without a process.

pub mod costs;
pub mod input;
pub mod select;
pub mod simulate;
pub mod verify;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};

pub const THREADS_ENV: &str = "QRKIT_THREADS";

/// Sizes the global worker pool from the flag, else `QRKIT_THREADS`,
/// else the rayon default. Returns the pool size.
pub fn init_threads(flag: Option<usize>) -> Result<usize> {
    let env = match std::env::var(THREADS_ENV) {
        Ok(v) => Some(v.trim().parse::<usize>().with_context(|| format!("{THREADS_ENV}={v:?} is not a count"))?),
        Err(_) => None,
    };
    if let Some(n) = flag.or(env) {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("configuring the worker pool")?;
    }
    Ok(rayon::current_num_threads())
}

/// Writer for `path`, or stdout.
pub fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(std::io::stdout().lock()),
    })
}

pub fn write_verify(rows: &[verify::CheckResult], w: impl Write) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["check", "max_error", "tolerance", "pass"])?;
    for r in rows {
        out.write_record([r.check.to_string(), format!("{:e}", r.max_error), format!("{:e}", r.tolerance), r.pass.to_string()])?;
    }
    out.flush()?;
    Ok(())
}

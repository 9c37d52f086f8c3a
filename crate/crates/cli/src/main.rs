use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use qrkit_bayes::simulate::{run_simulation, SimConfig};
use qrkit_cli::costs::{run_costs, write_costs, Grid};
use qrkit_cli::input::{load, InputOptions};
use qrkit_cli::select::{run_select, SelectConfig};
use qrkit_cli::simulate::write_simulation;
use qrkit_cli::verify::run_verify;
use qrkit_cli::{init_threads, output, write_verify};

#[derive(Parser)]
#[command(name = "qrkit", version, about = "QR and R-factor updating, cost tables, and Bayesian variable selection")]
struct Cli {
    /// Random seed (overrides the config file).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; falls back to QRKIT_THREADS.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// JSON configuration for `simulate` or `select`.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file (a directory for `select`); stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the self-check suite; exits 1 if any check fails.
    Verify {
        /// Random instances per check.
        #[arg(long, default_value_t = 25)]
        cases: usize,
        /// Deliberately perturb the named check.
        #[arg(long, value_name = "CHECK")]
        inject: Option<String>,
    },
    /// Predicted and measured operation counts.
    Costs {
        #[arg(long, value_enum, default_value_t = Grid::Figure)]
        grid: Grid,
    },
    /// Replicated simulation study.
    Simulate {
        #[arg(long)]
        reps: Option<usize>,
        #[arg(long)]
        draws: Option<usize>,
    },
    /// Variable selection on a CSV dataset.
    Select {
        /// Numeric CSV; the first column is the response unless --response is given.
        data: PathBuf,
        /// One-column CSV holding the response.
        #[arg(long)]
        response: Option<PathBuf>,
        /// Files start with a header row of column names.
        #[arg(long)]
        header: bool,
        /// Prepend a column of ones to the design.
        #[arg(long)]
        intercept: bool,
        /// Add exact posterior probabilities by enumerating every model.
        #[arg(long)]
        enumerate: bool,
        /// Comma-separated slab scales to choose from by cross-validation.
        #[arg(long, value_delimiter = ',')]
        upsilon_grid: Option<Vec<f64>>,
    },
}

fn read_config<T: serde::de::DeserializeOwned + Default>(path: Option<&Path>) -> Result<T> {
    match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            serde_json::from_str(&text).with_context(|| format!("parsing {}", p.display()))
        }
        None => Ok(T::default()),
    }
}

fn run(cli: Cli) -> Result<bool> {
    init_threads(cli.threads)?;
    let out = cli.out.as_deref();
    match cli.command {
        Command::Verify { cases, inject } => {
            let rows = run_verify(cli.seed.unwrap_or(1), cases, inject.as_deref())?;
            write_verify(&rows, output(out)?)?;
            Ok(rows.iter().all(|r| r.pass))
        }
        Command::Costs { grid } => {
            write_costs(&run_costs(grid, cli.seed.unwrap_or(1))?, output(out)?)?;
            Ok(true)
        }
        Command::Simulate { reps, draws } => {
            let mut cfg: SimConfig = read_config(cli.config.as_deref())?;
            cfg.seed = cli.seed.unwrap_or(cfg.seed);
            cfg.reps = reps.unwrap_or(cfg.reps);
            cfg.draws = draws.unwrap_or(cfg.draws);
            write_simulation(&run_simulation(&cfg)?, output(out)?)?;
            Ok(true)
        }
        Command::Select { data, response, header, intercept, enumerate, upsilon_grid } => {
            let mut cfg: SelectConfig = read_config(cli.config.as_deref())?;
            cfg.seed = cli.seed.unwrap_or(cfg.seed);
            if let Some(g) = upsilon_grid {
                cfg.upsilon_grid = g;
            }
            let opts = InputOptions { header, add_intercept: intercept };
            let loaded = load(&data, response.as_deref(), &opts)?;
            let report = run_select(&loaded, &cfg, enumerate)?;
            match out {
                Some(dir) => {
                    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
                    report.write_covariates(output(Some(&dir.join("mip.csv")))?)?;
                    report.write_models(output(Some(&dir.join("pmp.csv")))?)?;
                    if !report.cv.is_empty() {
                        report.write_cv(output(Some(&dir.join("cv.csv")))?)?;
                    }
                }
                None => {
                    report.write_covariates(output(None)?)?;
                    println!();
                    report.write_models(output(None)?)?;
                }
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

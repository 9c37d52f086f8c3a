//! Replicated simulation grid.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{generate_design, generate_response, Structure};
use crate::error::{Error, Result};
use crate::hyper::{default_hyperparams, sample_variance};
use crate::metrics::{evaluate, Metrics};
use crate::model::Dataset;
use crate::prior::PriorConfig;
use crate::sampler::{run_chain, ChainConfig};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct SimConfig {
    pub ns: Vec<usize>,
    pub ps: Vec<usize>,
    pub p0s: Vec<usize>,
    pub reps: usize,
    pub draws: usize,
    pub sigma2: f64,
    pub structure: Structure,
    pub rho: f64,
    pub seed: u64,
    pub prior: PriorConfig,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            ns: vec![100, 500],
            ps: vec![100, 1000],
            p0s: vec![10, 20],
            reps: 10,
            draws: 20_000,
            sigma2: 1.0,
            structure: Structure::Independent,
            rho: 0.0,
            seed: 1,
            prior: PriorConfig::default(),
        }
    }
}

/// Mean and standard error over replications.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Stat {
    pub mean: f64,
    pub se: f64,
}

impl Stat {
    /// NaN entries are skipped.
    pub fn of(v: impl IntoIterator<Item = f64>) -> Self {
        let v: Vec<f64> = v.into_iter().filter(|x| !x.is_nan()).collect();
        let k = v.len() as f64;
        let mean = v.iter().sum::<f64>() / k;
        let se = if v.len() > 1 {
            (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1.0) / k).sqrt()
        } else {
            f64::NAN
        };
        Self { mean, se }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CellResult {
    pub n: usize,
    pub p: usize,
    pub p0: usize,
    pub reps: usize,
    pub auc: Stat,
    pub f1: Stat,
    pub tpr: Stat,
    pub fdr: Stat,
    pub mse: Stat,
    /// Mean seconds per replication.
    pub seconds: f64,
}

/// One generated dataset and chain; returns metrics and elapsed seconds.
pub fn replicate(n: usize, p: usize, p0: usize, cfg: &SimConfig, seed: u64) -> Result<(Metrics, f64)> {
    let start = Instant::now();
    let x = generate_design(n, p, cfg.structure, cfg.rho, seed)?;
    let (y, beta) = generate_response(&x, p0, cfg.sigma2, seed ^ 0x9e37_79b9_7f4a_7c15)?;
    let hp = default_hyperparams(n, p, sample_variance(&y))?;
    let data = Dataset::new(x, y)?;
    let chain = ChainConfig { prior: cfg.prior, ..ChainConfig::new(cfg.draws, seed) };
    let summary = run_chain(&data, &hp, &chain)?;
    let m = evaluate(&summary, &beta)?;
    Ok((m, start.elapsed().as_secs_f64()))
}

/// Runs every `(n, p, p0)` cell; replications run in parallel on the
/// current rayon pool, and results do not depend on scheduling.
pub fn run_simulation(cfg: &SimConfig) -> Result<Vec<CellResult>> {
    if cfg.reps == 0 || cfg.draws < 2 {
        return Err(Error::InvalidConfig("need reps ≥ 1 and draws ≥ 2".into()));
    }
    let mut cells = Vec::new();
    for &n in &cfg.ns {
        for &p in &cfg.ps {
            for &p0 in &cfg.p0s {
                cells.push((n, p, p0));
            }
        }
    }
    let tasks: Vec<(usize, usize)> = (0..cells.len()).flat_map(|c| (0..cfg.reps).map(move |r| (c, r))).collect();
    let results = tasks
        .par_iter()
        .map(|&(c, r)| {
            let (n, p, p0) = cells[c];
            let seed = cfg.seed.wrapping_mul(1_000_003).wrapping_add((c * 10_007 + r) as u64);
            replicate(n, p, p0, cfg, seed)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(cells
        .iter()
        .enumerate()
        .map(|(c, &(n, p, p0))| {
            let rs = &results[c * cfg.reps..(c + 1) * cfg.reps];
            CellResult {
                n,
                p,
                p0,
                reps: cfg.reps,
                auc: Stat::of(rs.iter().map(|r| r.0.auc)),
                f1: Stat::of(rs.iter().map(|r| r.0.f1)),
                tpr: Stat::of(rs.iter().map(|r| r.0.tpr)),
                fdr: Stat::of(rs.iter().map(|r| r.0.fdr)),
                mse: Stat::of(rs.iter().map(|r| r.0.mse)),
                seconds: rs.iter().map(|r| r.1).sum::<f64>() / cfg.reps as f64,
            }
        })
        .collect())
}

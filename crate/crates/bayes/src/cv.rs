//! Cross-validated log predictive score for choosing the slab scale `υ₀`.

use qrkit_core::{dot, forward_substitution_transposed};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::enumerate::enumerate_posterior;
use crate::error::{Error, Result};
use crate::hyper::Hyperparams;
use crate::model::{Dataset, ModelState};
use crate::prior::PriorConfig;
use crate::sampler::Sampler;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CvConfig {
    pub folds: usize,
    /// Draws averaged per fold.
    pub draws: usize,
    /// Extra steps discarded before the first fold.
    pub burnin: usize,
    pub seed: u64,
    pub prior: PriorConfig,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CvScore {
    pub upsilon0: f64,
    pub score: f64,
}

/// Contiguous fold boundaries `[start, end)`.
pub fn fold_bounds(n: usize, folds: usize) -> Result<Vec<(usize, usize)>> {
    if folds < 2 {
        return Err(Error::InvalidConfig(format!("need at least 2 folds, got {folds}")));
    }
    let b: Vec<(usize, usize)> = (0..folds).map(|f| (f * n / folds, (f + 1) * n / folds)).collect();
    if let Some(f) = b.iter().position(|(s, e)| s == e) {
        return Err(Error::EmptyFold(f));
    }
    Ok(b)
}

fn training(data: &Dataset, (s, e): (usize, usize)) -> Result<Dataset> {
    let idx: Vec<usize> = (0..data.n()).filter(|i| *i < s || *i >= e).collect();
    data.subset_rows(&idx)
}

/// Log Student-t predictive density of `y` at row `x` (full width) under `state`
/// fitted on `n_train` observations.
pub fn log_predictive(state: &ModelState, x: &[f64], y: f64, n_train: usize, hp: &Hyperparams) -> Result<f64> {
    let xg: Vec<f64> = state.cols.iter().map(|&c| x[c]).collect();
    let a = forward_substitution_transposed(state.r.matrix(), &xg)?;
    let loc = dot(&a, &state.z);
    let shape = hp.nu + 0.5 * n_train as f64;
    let df = 2.0 * shape;
    let scale2 = (hp.lambda + 0.5 * state.s2) / shape * (1.0 + dot(&a, &a));
    if !(scale2 > 0.0) {
        return Err(Error::NumericalBreakdown(format!("predictive scale² = {scale2:e}")));
    }
    let t2 = (y - loc).powi(2) / (df * scale2);
    Ok(ln_gamma(0.5 * (df + 1.0)) - ln_gamma(0.5 * df) - 0.5 * (df * std::f64::consts::PI * scale2).ln()
        - 0.5 * (df + 1.0) * t2.ln_1p())
}

fn log_sum_exp(v: &[f64]) -> f64 {
    let m = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    m + v.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// Per-row streaming `log Σ exp`.
struct LogAccumulator {
    max: Vec<f64>,
    sum: Vec<f64>,
}

impl LogAccumulator {
    fn new(n: usize) -> Self {
        Self { max: vec![f64::NEG_INFINITY; n], sum: vec![0.0; n] }
    }

    fn add(&mut self, vals: &[f64], times: u64) {
        let w = times as f64;
        for (i, &v) in vals.iter().enumerate() {
            if v > self.max[i] {
                self.sum[i] = self.sum[i] * (self.max[i] - v).exp() + w;
                self.max[i] = v;
            } else {
                self.sum[i] += w * (v - self.max[i]).exp();
            }
        }
    }

    fn log_mean(&self, count: u64) -> Vec<f64> {
        let c = (count as f64).ln();
        self.max.iter().zip(&self.sum).map(|(m, s)| m + s.ln() - c).collect()
    }
}

fn test_scores(state: &ModelState, data: &Dataset, (s, e): (usize, usize), n_train: usize, hp: &Hyperparams) -> Result<Vec<f64>> {
    (s..e).map(|i| log_predictive(state, &data.x.row(i), data.y[i], n_train, hp)).collect()
}

/// Score for one `υ₀`: a single chain continues across folds, with the
/// factor moved between training sets by row downdates and updates.
pub fn score_one(data: &Dataset, hp: &Hyperparams, cfg: &CvConfig, stream: u64) -> Result<f64> {
    if cfg.draws == 0 {
        return Err(Error::InvalidConfig("need at least one draw per fold".into()));
    }
    let bounds = fold_bounds(data.n(), cfg.folds)?;
    let mut train = training(data, bounds[0])?;
    let mut sampler = Sampler::new(&train, *hp, cfg.prior, cfg.seed, stream)?;
    for _ in 0..cfg.burnin {
        sampler.step(&train);
    }
    let mut total = 0.0;
    for (f, &fold) in bounds.iter().enumerate() {
        if f > 0 {
            let next = training(data, fold)?;
            let (ps, pe) = bounds[f - 1];
            let removed = data.x.select_rows(&(fold.0..fold.1).collect::<Vec<_>>());
            let added = data.x.select_rows(&(ps..pe).collect::<Vec<_>>());
            let moved = match sampler.state().exchange_rows(&next, &removed, &added, hp) {
                Ok(s) => s,
                Err(e) => {
                    log::debug!("row exchange failed ({e}); refactorizing");
                    ModelState::from_scratch(&next, &sampler.state().cols, hp)?
                }
            };
            train = next;
            sampler.set_state(&train, moved);
        }
        let n_train = train.n();
        let mut acc = LogAccumulator::new(fold.1 - fold.0);
        let mut current = test_scores(sampler.state(), data, fold, n_train, hp)?;
        let mut run = 0u64;
        for t in 0..cfg.draws {
            if sampler.step(&train) {
                acc.add(&current, run);
                run = 0;
                current = test_scores(sampler.state(), data, fold, n_train, hp)?;
            }
            if (t + 1) % 1000 == 0 {
                sampler.audit(&train)?;
            }
            run += 1;
        }
        acc.add(&current, run);
        total += acc.log_mean(cfg.draws as u64).iter().sum::<f64>();
    }
    Ok(-total / data.n() as f64)
}

/// Scores every `υ₀` in `grid`, in parallel.
pub fn log_predictive_score(data: &Dataset, hp: &Hyperparams, grid: &[f64], cfg: &CvConfig) -> Result<Vec<CvScore>> {
    if grid.is_empty() {
        return Err(Error::InvalidConfig("empty slab-scale grid".into()));
    }
    grid.par_iter()
        .enumerate()
        .map(|(i, &u)| {
            let hp = Hyperparams { upsilon0: u, ..*hp };
            hp.validate()?;
            Ok(CvScore { upsilon0: u, score: score_one(data, &hp, cfg, i as u64)? })
        })
        .collect()
}

/// Entry with the smallest score.
pub fn best(scores: &[CvScore]) -> Option<CvScore> {
    scores.iter().copied().filter(|s| s.score.is_finite()).min_by(|a, b| a.score.total_cmp(&b.score))
}

/// The same score with the draw average replaced by the exact posterior
/// over all models of each training set.
pub fn exact_log_predictive_score(data: &Dataset, hp: &Hyperparams, folds: usize, prior: &PriorConfig) -> Result<f64> {
    let bounds = fold_bounds(data.n(), folds)?;
    let mut total = 0.0;
    for fold in bounds {
        let train = training(data, fold)?;
        let models = enumerate_posterior(&train, hp, prior)?;
        let states = models
            .iter()
            .map(|m| ModelState::from_scratch(&train, &m.cols, hp))
            .collect::<Result<Vec<_>>>()?;
        for i in fold.0..fold.1 {
            let row = data.x.row(i);
            let terms = models
                .iter()
                .zip(&states)
                .map(|(m, s)| Ok(m.prob.ln() + log_predictive(s, &row, data.y[i], train.n(), hp)?))
                .collect::<Result<Vec<_>>>()?;
            total += log_sum_exp(&terms);
        }
    }
    Ok(-total / data.n() as f64)
}

//! Variable selection on a user dataset.

use std::io::Write;

use anyhow::{Context, Result};
use qrkit_bayes::cv::{best, log_predictive_score, CvConfig, CvScore};
use qrkit_bayes::enumerate::{enumerate_posterior, exact_mip, ModelProbability};
use qrkit_bayes::hyper::sample_variance;
use qrkit_bayes::{default_hyperparams, run_chain, ChainConfig, ChainSummary, Hyperparams, PriorConfig};
use serde::{Deserialize, Serialize};

use crate::input::LoadedData;

/// JSON configuration; every field is optional.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SelectConfig {
    pub draws: usize,
    /// Defaults to a fifth of `draws`.
    pub burnin: Option<usize>,
    pub seed: u64,
    pub prior: PriorConfig,
    pub nu: Option<f64>,
    pub lambda: Option<f64>,
    pub upsilon0: Option<f64>,
    /// Candidate slab scales; when nonempty, `upsilon0` is chosen by
    /// cross-validated log predictive score.
    pub upsilon_grid: Vec<f64>,
    pub cv_folds: usize,
    pub cv_draws: usize,
    /// Rows reported in the model table.
    pub top_models: usize,
}

impl Default for SelectConfig {
    fn default() -> Self {
        Self {
            draws: 50_000,
            burnin: None,
            seed: 1,
            prior: PriorConfig::default(),
            nu: None,
            lambda: None,
            upsilon0: None,
            upsilon_grid: Vec::new(),
            cv_folds: 5,
            cv_draws: 5_000,
            top_models: 20,
        }
    }
}

pub struct SelectReport {
    pub names: Vec<String>,
    pub hp: Hyperparams,
    pub summary: ChainSummary,
    pub exact: Option<Vec<ModelProbability>>,
    pub cv: Vec<CvScore>,
    pub top_models: usize,
}

pub fn run_select(input: &LoadedData, cfg: &SelectConfig, enumerate: bool) -> Result<SelectReport> {
    let data = &input.data;
    let mut hp = default_hyperparams(data.n(), data.p(), sample_variance(&data.y))?;
    hp.nu = cfg.nu.unwrap_or(hp.nu);
    hp.lambda = cfg.lambda.unwrap_or(hp.lambda);
    hp.upsilon0 = cfg.upsilon0.unwrap_or(hp.upsilon0);
    let mut cv = Vec::new();
    if !cfg.upsilon_grid.is_empty() {
        let cv_cfg = CvConfig {
            folds: cfg.cv_folds,
            draws: cfg.cv_draws,
            burnin: cfg.cv_draws / 5,
            seed: cfg.seed,
            prior: cfg.prior,
        };
        cv = log_predictive_score(data, &hp, &cfg.upsilon_grid, &cv_cfg).context("cross-validating the slab scale")?;
        let chosen = best(&cv).context("no finite cross-validation score")?;
        log::info!("cross-validation picked υ₀ = {}", chosen.upsilon0);
        hp.upsilon0 = chosen.upsilon0;
    }
    let chain = ChainConfig {
        burnin: cfg.burnin.unwrap_or(cfg.draws / 5),
        prior: cfg.prior,
        ..ChainConfig::new(cfg.draws, cfg.seed)
    };
    let summary = run_chain(data, &hp, &chain)?;
    let exact = if enumerate { Some(enumerate_posterior(data, &hp, &cfg.prior)?) } else { None };
    Ok(SelectReport { names: input.names.clone(), hp, summary, exact, cv, top_models: cfg.top_models })
}

impl SelectReport {
    /// Per-column table: `column,name,mip,mpm,beta_bma,beta_mpm[,exact_mip]`.
    pub fn write_covariates(&self, w: impl Write) -> Result<()> {
        let s = &self.summary;
        let exact = self.exact.as_ref().map(|e| exact_mip(e, s.p));
        let mut out = csv::Writer::from_writer(w);
        let mut head = vec!["column", "name", "mip", "mpm", "beta_bma", "beta_mpm"];
        if exact.is_some() {
            head.push("exact_mip");
        }
        out.write_record(&head)?;
        for j in 0..s.p {
            let mut rec = vec![
                j.to_string(),
                self.names[j].clone(),
                s.mip[j].to_string(),
                u8::from(s.mpm[j]).to_string(),
                s.beta_bma[j].to_string(),
                s.beta_mpm[j].to_string(),
            ];
            if let Some(e) = &exact {
                rec.push(e[j].to_string());
            }
            out.write_record(&rec)?;
        }
        out.flush()?;
        Ok(())
    }

    /// Model table: `rank,model,estimated_pmp[,exact_pmp]`, models as
    /// `;`-separated column names. With enumeration the ranking is exact.
    pub fn write_models(&self, w: impl Write) -> Result<()> {
        let label = |cols: &[usize]| cols.iter().map(|&c| self.names[c].as_str()).collect::<Vec<_>>().join(";");
        let mut out = csv::Writer::from_writer(w);
        match &self.exact {
            Some(exact) => {
                out.write_record(["rank", "model", "estimated_pmp", "exact_pmp"])?;
                for (i, m) in exact.iter().take(self.top_models).enumerate() {
                    let est = self.summary.frequency_of(&m.cols);
                    out.write_record([(i + 1).to_string(), label(&m.cols), est.to_string(), m.prob.to_string()])?;
                }
            }
            None => {
                out.write_record(["rank", "model", "estimated_pmp"])?;
                for (i, (cols, f)) in self.summary.pmp_top.iter().take(self.top_models).enumerate() {
                    out.write_record([(i + 1).to_string(), label(cols), f.to_string()])?;
                }
            }
        }
        out.flush()?;
        Ok(())
    }

    pub fn write_cv(&self, w: impl Write) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["upsilon0", "score"])?;
        for s in &self.cv {
            out.write_record([s.upsilon0.to_string(), s.score.to_string()])?;
        }
        out.flush()?;
        Ok(())
    }
}

//! Selection and estimation accuracy.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampler::ChainSummary;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub auc: f64,
    pub f1: f64,
    pub tpr: f64,
    pub fdr: f64,
    pub mse: f64,
}

/// Area under the ROC curve via the rank-sum statistic, ties averaged.
/// NaN when either class is empty.
pub fn auc(scores: &[f64], truth: &[bool]) -> f64 {
    let n = scores.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && scores[idx[j + 1]] == scores[idx[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            ranks[k] = r;
        }
        i = j + 1;
    }
    let pos = truth.iter().filter(|&&t| t).count() as f64;
    let neg = n as f64 - pos;
    if pos == 0.0 || neg == 0.0 {
        return f64::NAN;
    }
    let rank_sum: f64 = ranks.iter().zip(truth).filter(|(_, &t)| t).map(|(r, _)| r).sum();
    (rank_sum - pos * (pos + 1.0) / 2.0) / (pos * neg)
}

/// `(F1, TPR, FDR)` of a selection. FDR is 0 when nothing is selected,
/// F1 is 1 when there is nothing to find and nothing is selected, and
/// TPR is NaN when there is nothing to find.
pub fn classification(selected: &[bool], truth: &[bool]) -> (f64, f64, f64) {
    let (mut tp, mut fp, mut fneg) = (0.0, 0.0, 0.0);
    for (&s, &t) in selected.iter().zip(truth) {
        match (s, t) {
            (true, true) => tp += 1.0,
            (true, false) => fp += 1.0,
            (false, true) => fneg += 1.0,
            _ => {}
        }
    }
    let denom = 2.0 * tp + fp + fneg;
    let f1 = if denom == 0.0 { 1.0 } else { 2.0 * tp / denom };
    let tpr = tp / (tp + fneg);
    let fdr = if tp + fp == 0.0 { 0.0 } else { fp / (tp + fp) };
    (f1, tpr, fdr)
}

pub fn mse(estimate: &[f64], truth: &[f64]) -> f64 {
    estimate.iter().zip(truth).map(|(a, b)| (a - b).powi(2)).sum::<f64>() / truth.len() as f64
}

/// Scores a chain against the true coefficients. Selection metrics skip
/// the intercept; MSE uses the model-averaged estimate of every coefficient.
pub fn evaluate(summary: &ChainSummary, beta_true: &[f64]) -> Result<Metrics> {
    if beta_true.len() != summary.p {
        return Err(Error::DimensionMismatch(format!("{} true coefficients for p = {}", beta_true.len(), summary.p)));
    }
    let truth: Vec<bool> = beta_true[1..].iter().map(|b| *b != 0.0).collect();
    let (f1, tpr, fdr) = classification(&summary.mpm[1..], &truth);
    Ok(Metrics {
        auc: auc(&summary.mip[1..], &truth),
        f1,
        tpr,
        fdr,
        mse: mse(&summary.beta_bma, beta_true),
    })
}

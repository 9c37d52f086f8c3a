//! Exact posterior over every model by brute force.
//!
//! Each model is scored through a Cholesky factor of its regularized Gram
//! matrix, independently of the updating code used by the sampler.

use qrkit_core::{dot, forward_substitution, DenseMatrix};
use rayon::prelude::*;

use crate::chol::cholesky;
use crate::error::{Error, Result};
use crate::hyper::Hyperparams;
use crate::model::{log_marginal_from_parts, Dataset};
use crate::prior::PriorConfig;

pub const MAX_ENUMERATION_P: usize = 20;

#[derive(Clone, Debug, PartialEq)]
pub struct ModelProbability {
    /// Included columns in increasing order, intercept first.
    pub cols: Vec<usize>,
    pub log_post: f64,
    pub prob: f64,
}

/// Unnormalized log posterior of `cols` from the Gram matrix `XᵀX`.
pub fn log_posterior_gram(
    gram: &DenseMatrix,
    data: &Dataset,
    cols: &[usize],
    hp: &Hyperparams,
    prior: &PriorConfig,
) -> Result<f64> {
    let k = cols.len();
    let g = DenseMatrix::from_fn(k, k, |i, j| gram[(cols[i], cols[j])] + if i == j { 1.0 / hp.upsilon0 } else { 0.0 });
    let l = cholesky(&g).ok_or_else(|| Error::NumericalBreakdown(format!("Gram of {cols:?} is not positive definite")))?;
    let rhs: Vec<f64> = cols.iter().map(|&c| data.xty[c]).collect();
    let z = forward_substitution(&l, &rhs)?;
    let s2 = data.yty - dot(&z, &z);
    let log_det: f64 = (0..k).map(|i| l[(i, i)].ln()).sum();
    let lml = log_marginal_from_parts(log_det, k, s2, data.n(), hp)?;
    Ok(lml + prior.log_prior(k - 1, data.candidates(), hp))
}

/// Posterior probability of all `2^(p−1)` models, most probable first.
pub fn enumerate_posterior(data: &Dataset, hp: &Hyperparams, prior: &PriorConfig) -> Result<Vec<ModelProbability>> {
    let p = data.p();
    if p > MAX_ENUMERATION_P {
        return Err(Error::TooManyCovariates { p, max: MAX_ENUMERATION_P });
    }
    hp.validate()?;
    let gram = data.x.t_matmul(&data.x);
    let pc = p - 1;
    let mut out = (0u32..1 << pc)
        .into_par_iter()
        .map(|mask| {
            let cols: Vec<usize> = std::iter::once(0).chain((0..pc).filter(|b| mask >> b & 1 == 1).map(|b| b + 1)).collect();
            let log_post = log_posterior_gram(&gram, data, &cols, hp, prior)?;
            Ok(ModelProbability { cols, log_post, prob: 0.0 })
        })
        .collect::<Result<Vec<_>>>()?;
    let top = out.iter().map(|m| m.log_post).fold(f64::NEG_INFINITY, f64::max);
    let total: f64 = out.iter().map(|m| (m.log_post - top).exp()).sum();
    for m in &mut out {
        m.prob = (m.log_post - top).exp() / total;
    }
    out.sort_by(|a, b| b.prob.total_cmp(&a.prob).then_with(|| a.cols.cmp(&b.cols)));
    Ok(out)
}

/// Exact inclusion probabilities from an enumerated posterior.
pub fn exact_mip(models: &[ModelProbability], p: usize) -> Vec<f64> {
    let mut mip = vec![0.0; p];
    for m in models {
        for &c in &m.cols {
            mip[c] += m.prob;
        }
    }
    mip
}

//! Prior over the inclusion vector.
//!
//! The intercept is always included, so only the `p − 1` remaining
//! covariates are random. `size` below counts included non-intercept
//! covariates and `candidates` is `p − 1`.

use serde::{Deserialize, Serialize};
use statrs::function::beta::ln_beta;
use statrs::function::factorial::ln_binomial;

use crate::hyper::Hyperparams;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThetaPrior {
    /// θ integrated out against its Beta hyperprior.
    BetaBinomial,
    /// θ held at the Beta prior mean.
    FixedAtMean,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PriorConfig {
    pub theta: ThetaPrior,
    /// Multiply by `C(candidates, size)`, as in the published form.
    pub binomial_coefficient: bool,
}

impl Default for PriorConfig {
    fn default() -> Self {
        Self {
            theta: ThetaPrior::BetaBinomial,
            binomial_coefficient: true,
        }
    }
}

/// `log[C(p, size) θ^size (1 − θ)^(p − size)]`.
pub fn log_prior_gamma(size: usize, p: usize, theta: f64) -> f64 {
    ln_binomial(p as u64, size as u64) + size as f64 * theta.ln() + (p - size) as f64 * (1.0 - theta).ln()
}

impl PriorConfig {
    /// Log prior of any model with `size` of `candidates` covariates.
    pub fn log_prior(&self, size: usize, candidates: usize, hp: &Hyperparams) -> f64 {
        let coef = if self.binomial_coefficient {
            ln_binomial(candidates as u64, size as u64)
        } else {
            0.0
        };
        let rest = match self.theta {
            ThetaPrior::BetaBinomial => {
                let (a, b) = (hp.theta_xi, hp.theta_phi);
                ln_beta(a + size as f64, b + (candidates - size) as f64) - ln_beta(a, b)
            }
            ThetaPrior::FixedAtMean => {
                let t = hp.theta_mean();
                size as f64 * t.ln() + (candidates - size) as f64 * (1.0 - t).ln()
            }
        };
        coef + rest
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_values() {
        assert!((log_prior_gamma(0, 7, 0.5) - 7.0 * 0.5f64.ln()).abs() < 1e-12);
        let want = (6.0 * 0.25f64.powi(2) * 0.75f64.powi(2)).ln();
        assert!((log_prior_gamma(2, 4, 0.25) - want).abs() < 1e-12);
    }

    fn hp() -> Hyperparams {
        Hyperparams { nu: 0.5, lambda: 0.5, upsilon0: 3.0, theta_xi: 2.0, theta_phi: 7.0 }
    }

    /// With the coefficient the prior is a law on model size; without it,
    /// a law on inclusion vectors.
    #[test]
    fn normalization() {
        for p in 1..=12usize {
            for theta in [ThetaPrior::BetaBinomial, ThetaPrior::FixedAtMean] {
                let with = PriorConfig { theta, binomial_coefficient: true };
                let sizes: f64 = (0..=p).map(|s| with.log_prior(s, p, &hp()).exp()).sum();
                assert!((sizes - 1.0).abs() < 1e-12, "{p} {theta:?} {sizes}");
                let without = PriorConfig { theta, binomial_coefficient: false };
                let masks: f64 = (0u32..1 << p)
                    .map(|mask| without.log_prior(mask.count_ones() as usize, p, &hp()).exp())
                    .sum();
                assert!((masks - 1.0).abs() < 1e-12, "{p} {theta:?} {masks}");
            }
        }
    }
}

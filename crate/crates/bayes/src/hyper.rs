//! Prior hyperparameters and their data-driven defaults.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `σ² ~ IG(ν, λ)`, `β_γ | σ² ~ N(0, σ² υ₀ I)`, `θ ~ Beta(ξ, φ)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Hyperparams {
    pub nu: f64,
    pub lambda: f64,
    pub upsilon0: f64,
    pub theta_xi: f64,
    pub theta_phi: f64,
}

impl Hyperparams {
    pub fn validate(&self) -> Result<()> {
        let all = [self.nu, self.lambda, self.upsilon0, self.theta_xi, self.theta_phi];
        if all.iter().all(|v| v.is_finite() && *v > 0.0) {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!("hyperparameters must be positive: {self:?}")))
        }
    }

    /// Prior mean of θ.
    pub fn theta_mean(&self) -> f64 {
        self.theta_xi / (self.theta_xi + self.theta_phi)
    }
}

const TAIL_PROB: f64 = 0.1;
const K0: f64 = 40.0;
const SIGMA_THETA: f64 = 0.1;

/// `P(Bin(n, mu) > k)`, summed in log space from the upper end.
pub fn binomial_upper_tail(n: usize, mu: f64, k: usize) -> f64 {
    if k >= n {
        return 0.0;
    }
    if mu <= 0.0 {
        return 0.0;
    }
    if mu >= 1.0 {
        return 1.0;
    }
    // log pmf(j) via the ratio pmf(j+1)/pmf(j) = (n−j)/(j+1) · mu/(1−mu)
    let odds = (mu / (1.0 - mu)).ln();
    let mut logs = Vec::with_capacity(n + 1);
    let mut lp = n as f64 * (1.0 - mu).ln();
    logs.push(lp);
    for j in 0..n {
        lp += ((n - j) as f64 / (j + 1) as f64).ln() + odds;
        logs.push(lp);
    }
    let top = logs[k + 1..].iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let s: f64 = logs[k + 1..].iter().map(|l| (l - top).exp()).sum();
    (top + s.ln()).exp().min(1.0)
}

/// Smallest-error `mu` with `P(Bin(n, mu) > k) = target`, by bisection.
pub fn solve_theta_mean(n: usize, k: usize, target: f64) -> Option<f64> {
    if k >= n {
        return None;
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if binomial_upper_tail(n, mid, k) < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Beta parameters with the given mean and standard deviation.
pub fn beta_from_moments(mean: f64, sd: f64) -> Result<(f64, f64)> {
    let common = mean * (1.0 - mean) / (sd * sd) - 1.0;
    let (xi, phi) = (mean * common, (1.0 - mean) * common);
    if xi > 0.0 && phi > 0.0 && xi.is_finite() && phi.is_finite() {
        Ok((xi, phi))
    } else {
        Err(Error::InfeasibleThetaPrior { mean, sd })
    }
}

/// Defaults for a design with `p` columns (intercept included) and `n` rows.
///
/// `K = max{40, log n}`; when `K ≥ p` no inclusion rate can put mass on
/// more than `K` covariates and the prior mean falls back to 1/2.
pub fn default_hyperparams(n: usize, p: usize, var_y: f64) -> Result<Hyperparams> {
    if n < 2 || p < 1 || !(var_y > 0.0) {
        return Err(Error::InvalidConfig(format!("need n ≥ 2, p ≥ 1, var_y > 0 (n = {n}, p = {p}, var_y = {var_y})")));
    }
    let (nf, pf) = (n as f64, p as f64);
    let lambda = if p < 1_000 {
        0.5
    } else if p < 10_000 {
        10.0
    } else {
        15.0
    };
    let upsilon0 = var_y * (pf.powf(2.1) / (100.0 * nf)).max(nf.ln());
    let k = K0.max(nf.ln()).floor() as usize;
    let mean = solve_theta_mean(p, k, TAIL_PROB).unwrap_or_else(|| {
        log::warn!("tail condition P(Bin({p}, μ) > {k}) = {TAIL_PROB} has no solution; using μ = 0.5");
        0.5
    });
    let mut sd = SIGMA_THETA;
    let (theta_xi, theta_phi) = loop {
        match beta_from_moments(mean, sd) {
            Ok(pair) => break pair,
            Err(_) => {
                log::warn!("Beta prior infeasible for mean {mean:.6} and sd {sd}; halving sd");
                sd /= 2.0;
            }
        }
    };
    Ok(Hyperparams {
        nu: 0.5,
        lambda,
        upsilon0,
        theta_xi,
        theta_phi,
    })
}

/// Unbiased sample variance.
pub fn sample_variance(y: &[f64]) -> f64 {
    let n = y.len() as f64;
    let mean = y.iter().sum::<f64>() / n;
    y.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn piecewise_lambda_and_slab_scale() {
        let hp = default_hyperparams(100, 500, 1.0).unwrap();
        assert_eq!(hp.lambda, 0.5);
        assert_eq!(hp.nu, 0.5);
        let want = (500f64.powf(2.1) / 1e4).max(100f64.ln());
        assert_eq!(hp.upsilon0, want);
        assert!((hp.upsilon0 - 46.541_139_165_901_76).abs() < 1e-12);
        assert_eq!(default_hyperparams(100, 5000, 1.0).unwrap().lambda, 10.0);
        assert_eq!(default_hyperparams(100, 20000, 1.0).unwrap().lambda, 15.0);
    }

    #[test]
    fn bisection_hits_target_tail() {
        for (p, n) in [(100, 500), (1000, 100), (500, 100)] {
            let k = 40.max((n as f64).ln() as usize);
            let mu = solve_theta_mean(p, k, 0.1).unwrap();
            assert!((binomial_upper_tail(p, mu, k) - 0.1).abs() < 1e-6);
        }
    }

    #[test]
    fn infeasible_moments_shrink_sd() {
        assert!(beta_from_moments(0.005, 0.1).is_err());
        let hp = default_hyperparams(100, 5000, 2.0).unwrap();
        assert!(hp.theta_xi > 0.0 && hp.theta_phi > 0.0);
        let (xi, phi) = beta_from_moments(0.3, 0.1).unwrap();
        assert!((xi / (xi + phi) - 0.3).abs() < 1e-12);
    }

    #[test]
    fn small_designs_fall_back_to_half() {
        let hp = default_hyperparams(100, 10, 1.0).unwrap();
        assert!((hp.theta_mean() - 0.5).abs() < 1e-12);
    }
}

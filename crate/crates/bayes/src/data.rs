//! Synthetic designs and responses.

use qrkit_core::DenseMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::chol::cholesky;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Structure {
    Independent,
    /// Unit variances, all correlations `ρ`.
    Equicorrelated,
    /// `corr(x_i, x_j) = ρ^|i−j|`.
    Decaying,
}

impl std::str::FromStr for Structure {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "independent" => Ok(Self::Independent),
            "equicorrelated" => Ok(Self::Equicorrelated),
            "decaying" => Ok(Self::Decaying),
            _ => Err(Error::InvalidConfig(format!("unknown design structure '{s}'"))),
        }
    }
}

/// `n × p` design: a column of ones followed by `p − 1` Gaussian covariates.
pub fn generate_design(n: usize, p: usize, structure: Structure, rho: f64, seed: u64) -> Result<DenseMatrix> {
    if p == 0 || n == 0 {
        return Err(Error::InvalidConfig(format!("design must be nonempty (n = {n}, p = {p})")));
    }
    if structure != Structure::Independent && !(0.0..1.0).contains(&rho) {
        return Err(Error::InvalidConfig(format!("correlation {rho} outside [0, 1)")));
    }
    let q = p - 1;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = DenseMatrix::zeros(n, p);
    x.col_mut(0).fill(1.0);
    let l = match structure {
        Structure::Independent => None,
        Structure::Equicorrelated => Some(DenseMatrix::from_fn(q, q, |i, j| if i == j { 1.0 } else { rho })),
        Structure::Decaying => Some(DenseMatrix::from_fn(q, q, |i, j| rho.powi(i.abs_diff(j) as i32))),
    }
    .map(|s| cholesky(&s).ok_or_else(|| Error::NumericalBreakdown("covariance is not positive definite".into())))
    .transpose()?;
    let mut w = vec![0.0; q];
    for i in 0..n {
        for v in w.iter_mut() {
            *v = rng.sample(StandardNormal);
        }
        for j in 0..q {
            x[(i, j + 1)] = match &l {
                None => w[j],
                Some(l) => (0..=j).map(|k| l[(j, k)] * w[k]).sum(),
            };
        }
    }
    Ok(x)
}

/// Response with the first `p0` coefficients (intercept included) active:
/// `β_j = 5(−1)^u (log n/√n + |z|)` with `u ~ Bern(0.4)`, `z ~ N(0, 1)`.
pub fn generate_response(x: &DenseMatrix, p0: usize, sigma2: f64, seed: u64) -> Result<(Vec<f64>, Vec<f64>)> {
    let (n, p) = x.shape();
    if p0 >= p && p0 > 0 {
        return Err(Error::InvalidConfig(format!("p0 = {p0} must be below p = {p}")));
    }
    if !(sigma2 >= 0.0) {
        return Err(Error::InvalidConfig(format!("noise variance {sigma2} is negative")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nf = n as f64;
    let floor = nf.ln() / nf.sqrt();
    let mut beta = vec![0.0; p];
    for b in beta.iter_mut().take(p0) {
        let sign = if rng.gen_bool(0.4) { -1.0 } else { 1.0 };
        let z: f64 = rng.sample(StandardNormal);
        *b = 5.0 * sign * (floor + z.abs());
    }
    let sd = sigma2.sqrt();
    let mut y = x.mat_vec(&beta);
    for v in y.iter_mut() {
        let e: f64 = rng.sample(StandardNormal);
        *v += sd * e;
    }
    Ok((y, beta))
}

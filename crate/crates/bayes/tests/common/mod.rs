#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use qrkit_bayes::data::{generate_design, generate_response, Structure};
use qrkit_bayes::{Dataset, Hyperparams};
use qrkit_core::DenseMatrix;

pub fn to_na(m: &DenseMatrix) -> DMatrix<f64> {
    DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// `log ℓ(γ)` through the n × n marginal covariance `I + υ₀ X_γ X_γᵀ`.
pub fn dense_log_marginal(data: &Dataset, cols: &[usize], hp: &Hyperparams) -> f64 {
    let n = data.n();
    let xg = to_na(&data.x.select_cols(cols));
    let cov = DMatrix::identity(n, n) + &xg * xg.transpose() * hp.upsilon0;
    let y = DVector::from_column_slice(&data.y);
    let inv = cov.clone().try_inverse().unwrap();
    let s2 = (y.transpose() * inv * &y)[(0, 0)];
    -0.5 * cov.determinant().ln() - (hp.nu + n as f64 / 2.0) * (hp.lambda + s2 / 2.0).ln()
}

pub fn simulated(n: usize, p: usize, p0: usize, sigma2: f64, seed: u64) -> (Dataset, Vec<f64>) {
    let x = generate_design(n, p, Structure::Independent, 0.0, seed).unwrap();
    let (y, beta) = generate_response(&x, p0, sigma2, seed + 1).unwrap();
    (Dataset::new(x, y).unwrap(), beta)
}

pub fn hp(upsilon0: f64) -> Hyperparams {
    Hyperparams { nu: 0.5, lambda: 0.5, upsilon0, theta_xi: 1.5, theta_phi: 3.0 }
}

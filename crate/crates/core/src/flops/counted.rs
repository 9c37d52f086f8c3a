//! Instrumented twins of the public operations.
//!
//! Each returns the same result as the uninstrumented call together with
//! the operations it performed.

use super::FlopCounter;
use crate::error::Result;
use crate::linalg::{self, QrFactors, RFactor};
use crate::matrix::DenseMatrix;
use crate::{qr_update, r_update};

fn run<T>(f: impl FnOnce(&mut FlopCounter) -> Result<T>) -> Result<(T, FlopCounter)> {
    let mut fc = FlopCounter::new();
    let out = f(&mut fc)?;
    Ok((out, fc))
}

pub fn givens(a: f64, b: f64) -> (linalg::GivensRotation, FlopCounter) {
    let mut fc = FlopCounter::new();
    (linalg::givens_counted(a, b, &mut fc), fc)
}

pub fn householder(a: f64, x: &[f64]) -> (linalg::HouseholderReflector, FlopCounter) {
    let mut fc = FlopCounter::new();
    (linalg::householder_counted(a, x, &mut fc), fc)
}

pub fn qr_factorize(x: &DenseMatrix) -> Result<(QrFactors, FlopCounter)> {
    run(|fc| linalg::qr_factorize_counted(x, fc))
}

pub fn forward_substitution(l: &DenseMatrix, b: &[f64]) -> Result<(Vec<f64>, FlopCounter)> {
    run(|fc| linalg::forward_substitution_counted(l, b, fc))
}

pub fn backward_substitution(u: &DenseMatrix, b: &[f64]) -> Result<(Vec<f64>, FlopCounter)> {
    run(|fc| linalg::backward_substitution_counted(u, b, fc))
}

pub fn forward_substitution_transposed(u: &DenseMatrix, b: &[f64]) -> Result<(Vec<f64>, FlopCounter)> {
    run(|fc| linalg::forward_substitution_transposed_counted(u, b, fc))
}

pub fn qr_add_rows(f: &QrFactors, k: usize, u: &DenseMatrix) -> Result<(QrFactors, FlopCounter)> {
    run(|fc| qr_update::qr_add_rows_counted(f, k, u, fc))
}

pub fn qr_delete_rows(f: &QrFactors, k: usize, m: usize) -> Result<(QrFactors, FlopCounter)> {
    run(|fc| qr_update::qr_delete_rows_counted(f, k, m, fc))
}

pub fn qr_add_cols(f: &QrFactors, k: usize, v: &DenseMatrix) -> Result<(QrFactors, FlopCounter)> {
    run(|fc| qr_update::qr_add_cols_counted(f, k, v, fc))
}

pub fn qr_delete_cols(f: &QrFactors, k: usize, m: usize) -> Result<(QrFactors, FlopCounter)> {
    run(|fc| qr_update::qr_delete_cols_counted(f, k, m, fc))
}

pub fn qr_delete_cols_nonadjacent(f: &QrFactors, ks: &[usize]) -> Result<(QrFactors, FlopCounter)> {
    run(|fc| qr_update::qr_delete_cols_nonadjacent_counted(f, ks, fc))
}

pub fn r_add_rows(r1: &RFactor, u: &DenseMatrix) -> Result<(RFactor, FlopCounter)> {
    run(|fc| r_update::r_add_rows_counted(r1, u, fc))
}

pub fn r_delete_rows(r1: &RFactor, u: &DenseMatrix) -> Result<(RFactor, FlopCounter)> {
    run(|fc| r_update::r_delete_rows_counted(r1, u, fc))
}

pub fn r_add_cols(r1: &RFactor, x: &DenseMatrix, v: &DenseMatrix) -> Result<(RFactor, FlopCounter)> {
    run(|fc| r_update::r_add_cols_counted(r1, x, v, fc))
}

pub fn r_delete_cols(r1: &RFactor, k: usize, m: usize) -> Result<(RFactor, FlopCounter)> {
    run(|fc| r_update::r_delete_cols_counted(r1, k, m, fc))
}

pub fn r_delete_cols_nonadjacent(r1: &RFactor, ks: &[usize]) -> Result<(RFactor, FlopCounter)> {
    run(|fc| r_update::r_delete_cols_nonadjacent_counted(r1, ks, fc))
}

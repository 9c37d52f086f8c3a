#![allow(dead_code)]

use qrkit_core::{DenseMatrix, QrFactors, RFactor};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard normal entries via Box–Muller.
pub fn gaussian(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DenseMatrix {
    DenseMatrix::from_fn(rows, cols, |_, _| {
        let u: f64 = rng.gen_range(f64::EPSILON..1.0);
        let v: f64 = rng.gen();
        (-2.0 * u.ln()).sqrt() * (std::f64::consts::TAU * v).cos()
    })
}

pub fn factors(x: &DenseMatrix) -> QrFactors {
    qrkit_core::qr_factorize(x).expect("full-rank design")
}

pub fn rfactor(x: &DenseMatrix) -> RFactor {
    RFactor::from_design(x).expect("full-rank design")
}

/// Relative distance between two triangular factors once row signs agree.
pub fn r_gap(a: &DenseMatrix, b: &DenseMatrix) -> f64 {
    qrkit_core::factor_diff(a, b)
}

/// Sorted random subset of `1..=p` of size `m`.
pub fn positions(rng: &mut ChaCha8Rng, p: usize, m: usize) -> Vec<usize> {
    let mut all: Vec<usize> = (1..=p).collect();
    for i in 0..m {
        let j = rng.gen_range(i..p);
        all.swap(i, j);
    }
    let mut ks = all[..m].to_vec();
    ks.sort_unstable();
    ks
}

pub fn is_adjacent(ks: &[usize]) -> bool {
    ks[ks.len() - 1] - ks[0] == ks.len() - 1
}

/// `X` with columns at sorted 1-based `ks` removed.
pub fn drop_cols(x: &DenseMatrix, ks: &[usize]) -> DenseMatrix {
    let keep: Vec<usize> = (0..x.ncols()).filter(|c| !ks.contains(&(c + 1))).collect();
    x.select_cols(&keep)
}

/// Reference triangular factor and leading orthonormal columns from nalgebra.
pub fn reference_qr(x: &DenseMatrix) -> (DenseMatrix, DenseMatrix) {
    let (n, p) = x.shape();
    let a = nalgebra::DMatrix::from_column_slice(n, p, x.as_slice());
    let qr = a.qr();
    let r = qr.r();
    let q = qr.q();
    let rows = r.nrows();
    (
        DenseMatrix::from_col_slice(rows, p, r.as_slice()),
        DenseMatrix::from_col_slice(n, q.ncols(), q.as_slice()),
    )
}

/// Leading `p` columns of `q`, each scaled by the sign of the matching
/// diagonal entry of `r`.
pub fn signed_q1(q: &DenseMatrix, r: &DenseMatrix) -> DenseMatrix {
    let p = r.ncols().min(r.nrows());
    DenseMatrix::from_fn(q.nrows(), p, |i, j| if r[(j, j)] < 0.0 { -q[(i, j)] } else { q[(i, j)] })
}

/// Largest discrepancy of a full factorization against the reference for
/// the modified design: `(R gap, Q₁ gap, ‖QᵀQ − I‖, ‖QR − X‖/‖X‖)`.
pub fn check_full(f: &QrFactors, x: &DenseMatrix) -> (f64, f64, f64, f64) {
    let p = x.ncols();
    let (r_ref, q_ref) = reference_qr(x);
    let r_top = f.r.submatrix(0, p, 0, p);
    let r_gap = factor_diff(&r_top, &r_ref.submatrix(0, p, 0, p));
    let below = f.r.submatrix(p, f.r.nrows(), 0, p).frobenius_norm() / x.frobenius_norm();
    let q_gap = qrkit_core::rel_diff(&signed_q1(&f.q, &r_top), &signed_q1(&q_ref, &r_ref));
    let recon = qrkit_core::rel_diff(&f.reconstruct(), x);
    (r_gap + below, q_gap, f.orthogonality_error(), recon)
}

pub fn check_thin(r: &RFactor, x: &DenseMatrix) -> f64 {
    let p = x.ncols();
    let (r_ref, _) = reference_qr(x);
    factor_diff(r.matrix(), &r_ref.submatrix(0, p, 0, p))
}

use qrkit_core::factor_diff;

//! Updated factors against a from-scratch factorization of the modified design.

mod common;

use common::{check_full, check_thin, drop_cols, gaussian, positions};
use qrkit_core::*;
use rand::Rng;

const TOL: f64 = 1e-9;

fn assert_full(f: &QrFactors, x: &DenseMatrix, what: &str) {
    let (r, q, orth, recon) = check_full(f, x);
    let n = x.nrows() as f64;
    assert!(r <= TOL && q <= TOL, "{what}: R gap {r:e}, Q gap {q:e}");
    assert!(orth <= 1e-12 * n && recon <= 1e-10, "{what}: orth {orth:e}, recon {recon:e}");
}

fn assert_thin(r: &RFactor, x: &DenseMatrix, what: &str) {
    let gap = check_thin(r, x);
    assert!(gap <= TOL, "{what}: R gap {gap:e}");
}

#[test]
fn random_configurations_match_reference() {
    let mut rng = common::rng(2024);
    for t in 0..120 {
        let p = rng.gen_range(2..=16);
        let m = rng.gen_range(1..=5);
        let n = rng.gen_range((p + m + 1).max(8)..=64);
        let x = gaussian(&mut rng, n, p);
        let f = common::factors(&x);
        let r1 = f.r1();
        let tag = |op: &str| format!("case {t} {op} N={n} p={p} m={m}");

        for k in [1, rng.gen_range(1..=n + 1), n + 1] {
            let u = gaussian(&mut rng, m, p);
            let xp = x.insert_rows(k - 1, &u);
            assert_full(&qr_add_rows(&f, k, &u).unwrap(), &xp, &tag("add rows"));
            assert_thin(&r_add_rows(&r1, &u).unwrap(), &xp, &tag("r add rows"));
        }
        if n - m >= p {
            for k in [1, rng.gen_range(1..=n - m + 1), n - m + 1] {
                let xm = x.remove_rows(k - 1, m);
                assert_full(&qr_delete_rows(&f, k, m).unwrap(), &xm, &tag("delete rows"));
                let u = x.submatrix(k - 1, k - 1 + m, 0, p);
                assert_thin(&r_delete_rows(&r1, &u).unwrap(), &xm, &tag("r delete rows"));
            }
        }
        for k in [1, rng.gen_range(1..=p + 1), p + 1] {
            let v = gaussian(&mut rng, n, m);
            let xp = x.insert_cols(k - 1, &v);
            assert_full(&qr_add_cols(&f, k, &v).unwrap(), &xp, &tag("add cols"));
            if k == p + 1 {
                assert_thin(&r_add_cols(&r1, &x, &v).unwrap(), &xp, &tag("r add cols"));
            }
        }
        if m < p {
            for k in [1, rng.gen_range(1..=p - m + 1), p - m + 1] {
                let xm = x.remove_cols(k - 1, m);
                assert_full(&qr_delete_cols(&f, k, m).unwrap(), &xm, &tag("delete cols"));
                assert_thin(&r_delete_cols(&r1, k, m).unwrap(), &xm, &tag("r delete cols"));
            }
            for _ in 0..3 {
                let ks = positions(&mut rng, p, m);
                let xm = drop_cols(&x, &ks);
                let what = tag(&format!("non-adjacent {ks:?}"));
                assert_full(&qr_delete_cols_nonadjacent(&f, &ks).unwrap(), &xm, &what);
                assert_thin(&r_delete_cols_nonadjacent(&r1, &ks).unwrap(), &xm, &what);
            }
        }
    }
}

#[test]
fn from_scratch_factorization_matches_reference() {
    let mut rng = common::rng(7);
    for _ in 0..50 {
        let p = rng.gen_range(1..=16);
        let n = rng.gen_range(p..=64);
        let x = gaussian(&mut rng, n, p);
        assert_full(&common::factors(&x), &x, "factorize");
    }
}

#[test]
fn square_design_grows_by_one_row() {
    let mut rng = common::rng(8);
    let x = gaussian(&mut rng, 5, 5);
    let f = common::factors(&x);
    let u = gaussian(&mut rng, 1, 5);
    assert_full(&qr_add_rows(&f, 3, &u).unwrap(), &x.insert_rows(2, &u), "square");
}

#[test]
fn rank_deficient_column_is_reported_by_update() {
    let mut rng = common::rng(9);
    let x = gaussian(&mut rng, 12, 4);
    let r1 = common::rfactor(&x);
    let v = DenseMatrix::from_fn(12, 1, |i, _| x[(i, 0)] + x[(i, 2)]);
    // exactly dependent: the squared residual is round-off, never strongly negative
    let out = r_add_cols(&r1, &x, &v).unwrap();
    assert!(out.matrix()[(4, 4)].abs() < 1e-6);
}

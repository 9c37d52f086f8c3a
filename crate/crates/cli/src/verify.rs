//! Self-check suite: every update against a from-scratch factorization,
//! roundtrips, inverse maintenance, operation counts, and sampler audits.

use anyhow::{bail, Result};
use qrkit_bayes::enumerate::enumerate_posterior;
use qrkit_bayes::hyper::sample_variance;
use qrkit_bayes::{default_hyperparams, run_chain, ChainConfig, Dataset, ModelState, PriorConfig, Sampler};
use qrkit_core::flops::{counted, measure_cost, predict_cost, CostQuery, Operation};
use qrkit_core::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub check: &'static str,
    pub max_error: f64,
    pub tolerance: f64,
    pub pass: bool,
}

struct Ctx {
    rng: ChaCha8Rng,
    cases: usize,
    taint: bool,
}

impl Ctx {
    fn gaussian(&mut self, rows: usize, cols: usize) -> DenseMatrix {
        DenseMatrix::from_fn(rows, cols, |_, _| self.rng.sample(StandardNormal))
    }

    /// Random `(N, p, m)` with room for every operation.
    fn shape(&mut self) -> (usize, usize, usize) {
        let p = self.rng.gen_range(2..=12);
        let m = self.rng.gen_range(1..p.min(5));
        let n = self.rng.gen_range(p + m + 2..=48);
        (n, p, m)
    }

    /// Perturbs a result when this check is the fault-injection target.
    fn spoil(&self, m: &mut DenseMatrix) {
        if self.taint {
            m[(0, 0)] += 1e-6 * m.frobenius_norm().max(1.0);
        }
    }

    fn spoil_value(&self, v: f64, by: f64) -> f64 {
        if self.taint {
            v + by
        } else {
            v
        }
    }
}

type CheckFn = fn(&mut Ctx) -> Result<f64>;

/// Check inventory in report order: name, tolerance, body.
const CHECKS: [(&str, f64, CheckFn); 20] = [
    ("givens", 1e-13, check_givens),
    ("householder", 1e-12, check_householder),
    ("qr_factorize", 1e-10, check_factorize),
    ("qr_add_rows", 1e-9, check_qr_add_rows),
    ("qr_delete_rows", 1e-9, check_qr_delete_rows),
    ("qr_add_cols", 1e-9, check_qr_add_cols),
    ("qr_delete_cols", 1e-9, check_qr_delete_cols),
    ("qr_delete_cols_nonadjacent", 1e-9, check_qr_delete_nonadjacent),
    ("r_add_rows", 1e-9, check_r_add_rows),
    ("r_delete_rows", 1e-9, check_r_delete_rows),
    ("r_add_cols", 1e-9, check_r_add_cols),
    ("r_delete_cols", 1e-9, check_r_delete_cols),
    ("r_delete_cols_nonadjacent", 1e-9, check_r_delete_nonadjacent),
    ("roundtrip_rows", 1e-8, check_roundtrip_rows),
    ("roundtrip_cols", 1e-8, check_roundtrip_cols),
    ("gram_inverse_add_col", 1e-9, check_gram_add),
    ("gram_inverse_delete_col", 1e-9, check_gram_delete),
    ("flop_exactness", 0.0, check_flops),
    ("log_marginal_audit", 1e-8, check_audit),
    ("enumeration_vs_chain", 0.02, check_enumeration),
];

pub fn check_names() -> Vec<&'static str> {
    CHECKS.iter().map(|c| c.0).collect()
}

/// Runs the suite. `inject` names a check whose result is deliberately
/// perturbed, to confirm that the suite can fail.
pub fn run_verify(seed: u64, cases: usize, inject: Option<&str>) -> Result<Vec<CheckResult>> {
    if let Some(name) = inject {
        if !CHECKS.iter().any(|c| c.0 == name) {
            bail!("unknown check '{name}'; expected one of {}", check_names().join(", "));
        }
    }
    CHECKS
        .iter()
        .enumerate()
        .map(|(i, &(check, tolerance, f))| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let mut ctx = Ctx { rng, cases: cases.max(1), taint: inject == Some(check) };
            let max_error = f(&mut ctx)?;
            log::info!("{check}: {max_error:e} (tolerance {tolerance:e})");
            Ok(CheckResult { check, max_error, tolerance, pass: max_error <= tolerance })
        })
        .collect()
}

fn full_gap(f: &QrFactors, x: &DenseMatrix) -> Result<f64> {
    let reference = qr_factorize(x)?;
    Ok(factor_diff(&f.r, &reference.r)
        .max(rel_diff(&f.reconstruct(), x))
        .max(f.orthogonality_error() / x.nrows() as f64))
}

fn thin_gap(r: &RFactor, x: &DenseMatrix) -> Result<f64> {
    Ok(factor_diff(r.matrix(), RFactor::from_design(x)?.matrix()))
}

fn check_givens(ctx: &mut Ctx) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for _ in 0..ctx.cases * 10 {
        let (a, b): (f64, f64) = (ctx.rng.sample(StandardNormal), ctx.rng.sample(StandardNormal));
        let g = givens(a, b);
        let (_, zero) = g.rotate(a, b);
        worst = worst.max((g.c * g.c + g.s * g.s - 1.0).abs()).max(zero.abs() / a.hypot(b));
    }
    Ok(ctx.spoil_value(worst, 1e-10))
}

fn check_householder(ctx: &mut Ctx) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for _ in 0..ctx.cases {
        let m = ctx.rng.gen_range(1..8);
        let a: f64 = ctx.rng.sample(StandardNormal);
        let x: Vec<f64> = (0..m).map(|_| ctx.rng.sample(StandardNormal)).collect();
        let h = householder(a, &x);
        let mut y = std::iter::once(a).chain(x.iter().copied()).collect::<Vec<_>>();
        let norm = dot(&y, &y).sqrt();
        h.apply(&mut y);
        let tail = dot(&y[1..], &y[1..]).sqrt();
        worst = worst.max(tail / norm).max((y[0].abs() - norm).abs() / norm);
    }
    Ok(ctx.spoil_value(worst, 1e-8))
}

fn check_factorize(ctx: &mut Ctx) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for _ in 0..ctx.cases {
        let (n, p, _) = ctx.shape();
        let x = ctx.gaussian(n, p);
        let mut f = qr_factorize(&x)?;
        ctx.spoil(&mut f.r);
        worst = worst.max(rel_diff(&f.reconstruct(), &x)).max(f.orthogonality_error() / n as f64);
    }
    Ok(worst)
}

fn check_qr_add_rows(ctx: &mut Ctx) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for _ in 0..ctx.cases {
        let (n, p, m) = ctx.shape();
        let x = ctx.gaussian(n, p);
        let u = ctx.gaussian(m, p);
        let k = ctx.rng.gen_range(1..=n + 1);
        let mut f = qr_add_rows(&qr_factorize(&x)?, k, &u)?;
        ctx.spoil(&mut f.r);
        worst = worst.max(full_gap(&f, &x.insert_rows(k - 1, &u))?);
    }
    Ok(worst)
}

fn check_qr_delete_rows(ctx: &mut Ctx) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for _ in 0..ctx.cases {
        let (n, p, m) = ctx.shape();
        let x = ctx.gaussian(n, p);
        let k = ctx.rng.gen_range(1..=n - m + 1);
        let mut f = qr_delete_rows(&qr_factorize(&x)?, k, m)?;
        ctx.spoil(&mut f.r);
        worst = worst.max(full_gap(&f, &x.remove_rows(k - 1, m))?);
    }
    Ok(worst)
}

fn check_qr_add_cols(ctx: &mut Ctx) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for _ in 0..ctx.cases {
        let (n, p, m) = ctx.shape();
        let x = ctx.gaussian(n, p);
        let v = ctx.gaussian(n, m);
        let k = ctx.rng.gen_range(1..=p + 1);
        let mut f = qr_add_cols(&qr_factorize(&x)?, k, &v)?;
        ctx.spoil(&mut f.r);
        worst = worst.max(full_gap(&f, &x.insert_cols(k - 1, &v))?);
    }
    Ok(worst)
}

fn check_qr_delete_cols(ctx: &mut Ctx) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for _ in 0..ctx.cases {
        let (n, p, m) = ctx.shape();
        let x = ctx.gaussian(n, p);
        let k = ctx.rng.gen_range(1..=p - m + 1);
        let mut f = qr_delete_cols(&qr_factorize(&x)?, k, m)?;
        ctx.spoil(&mut f.r);
        worst = worst.max(full_gap(&f, &x.remove_cols(k - 1, m))?);
    }
    Ok(worst)
}

/// Sorted random subset of `1..=p` of size `m`, and `X` without those columns.
fn scatter(ctx: &mut Ctx, x: &DenseMatrix, m: usize) -> (Vec<usize>, DenseMatrix) {
    let p = x.ncols();
    let mut all: Vec<usize> = (1..=p).collect();
    for i in 0..m {
        let j = ctx.rng.gen_range(i..p);
        all.swap(i, j);
    }
    let mut ks = all[..m].to_vec();
    ks.sort_unstable();
    let keep: Vec<usize> = (0..p).filter(|j| !ks.contains(&(j + 1))).collect();
    (ks, x.select_cols(&keep))
}

fn check_qr_delete_nonadjacent(ctx: &mut Ctx) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for _ in 0..ctx.cases {
        let (n, p, m) = ctx.shape();
        let x = ctx.gaussian(n, p);
        let (ks, xm) = scatter(ctx, &x, m);
        let mut f = qr_delete_cols_nonadjacent(&qr_factorize(&x)?, &ks)?;
        ctx.spoil(&mut f.r);
        worst = worst.max(full_gap(&f, &xm)?);
    }
    Ok(worst)
}

fn check_r_add_rows(ctx: &mut Ctx) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for _ in 0..ctx.cases {
        let (n, p, m) = ctx.shape();
        let x = ctx.gaussian(n, p);
        let u = ctx.gaussian(m, p);
        let r = r_add_rows(&RFactor::from_design(&x)?, &u)?;
        let mut r = r.into_matrix();
        ctx.spoil(&mut r);
        worst = worst.max(thin_gap(&RFactor::from_upper(r), &x.insert_rows(n, &u))?);
    }
    Ok(worst)
}

fn check_r_delete_rows(ctx: &mut Ctx) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for _ in 0..ctx.cases {
        let (n, p, m) = ctx.shape();
        let x = ctx.gaussian(n, p);
        let k = ctx.rng.gen_range(0..=n - m);
        let u = x.submatrix(k, k + m, 0, p);
        let mut r = r_delete_rows(&RFactor::from_design(&x)?, &u)?.into_matrix();
        ctx.spoil(&mut r);
        worst = worst.max(thin_gap(&RFactor::from_upper(r), &x.remove_rows(k, m))?);
    }
    Ok(worst)
}

fn check_r_add_cols(ctx: &mut Ctx) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for _ in 0..ctx.cases {
        let (n, p, m) = ctx.shape();
        let x = ctx.gaussian(n, p);
        let v = ctx.gaussian(n, m);
        let mut r = r_add_cols(&RFactor::from_design(&x)?, &x, &v)?.into_matrix();
        ctx.spoil(&mut r);
        worst = worst.max(thin_gap(&RFactor::from_upper(r), &x.insert_cols(p, &v))?);
    }
    Ok(worst)
}

fn check_r_delete_cols(ctx: &mut Ctx) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for _ in 0..ctx.cases {
        let (n, p, m) = ctx.shape();
        let x = ctx.gaussian(n, p);
        let k = ctx.rng.gen_range(1..=p - m + 1);
        let mut r = r_delete_cols(&RFactor::from_design(&x)?, k, m)?.into_matrix();
        ctx.spoil(&mut r);
        worst = worst.max(thin_gap(&RFactor::from_upper(r), &x.remove_cols(k - 1, m))?);
    }
    Ok(worst)
}

fn check_r_delete_nonadjacent(ctx: &mut Ctx) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for _ in 0..ctx.cases {
        let (n, p, m) = ctx.shape();
        let x = ctx.gaussian(n, p);
        let (ks, xm) = scatter(ctx, &x, m);
        let mut r = r_delete_cols_nonadjacent(&RFactor::from_design(&x)?, &ks)?.into_matrix();
        ctx.spoil(&mut r);
        worst = worst.max(thin_gap(&RFactor::from_upper(r), &xm)?);
    }
    Ok(worst)
}

fn check_roundtrip_rows(ctx: &mut Ctx) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for _ in 0..ctx.cases {
        let (n, p, m) = ctx.shape();
        let x = ctx.gaussian(n, p);
        let u = ctx.gaussian(m, p);
        let k = ctx.rng.gen_range(1..=n + 1);
        let f = qr_factorize(&x)?;
        let mut back = qr_delete_rows(&qr_add_rows(&f, k, &u)?, k, m)?;
        ctx.spoil(&mut back.r);
        worst = worst.max(factor_diff(&back.r, &f.r));
        let r1 = f.r1();
        let thin = r_delete_rows(&r_add_rows(&r1, &u)?, &u)?;
        worst = worst.max(factor_diff(thin.matrix(), r1.matrix()));
    }
    Ok(worst)
}

fn check_roundtrip_cols(ctx: &mut Ctx) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for _ in 0..ctx.cases {
        let (n, p, m) = ctx.shape();
        let x = ctx.gaussian(n, p);
        let v = ctx.gaussian(n, m);
        let k = ctx.rng.gen_range(1..=p + 1);
        let f = qr_factorize(&x)?;
        let mut back = qr_delete_cols(&qr_add_cols(&f, k, &v)?, k, m)?;
        ctx.spoil(&mut back.r);
        worst = worst.max(factor_diff(&back.r, &f.r));
        let r1 = f.r1();
        let thin = r_delete_cols(&r_add_cols(&r1, &x, &v)?, p + 1, m)?;
        worst = worst.max(factor_diff(thin.matrix(), r1.matrix()));
    }
    Ok(worst)
}

/// `(XᵀX)⁻¹` from the triangular factor by two triangular solves per column.
fn inverse_via_factor(x: &DenseMatrix) -> Result<DenseMatrix> {
    let r = RFactor::from_design(x)?;
    let p = r.dim();
    let mut out = DenseMatrix::zeros(p, p);
    for j in 0..p {
        let e: Vec<f64> = (0..p).map(|i| if i == j { 1.0 } else { 0.0 }).collect();
        let w = forward_substitution_transposed(r.matrix(), &e)?;
        let col = backward_substitution(r.matrix(), &w)?;
        out.col_mut(j).copy_from_slice(&col);
    }
    Ok(out)
}

fn check_gram_add(ctx: &mut Ctx) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for _ in 0..ctx.cases {
        let (n, p, _) = ctx.shape();
        let x = ctx.gaussian(n, p);
        let xk = ctx.gaussian(n, 1);
        let k = ctx.rng.gen_range(1..=p + 1);
        let b = inverse_via_factor(&x)?;
        let mut got = gram_inverse_add_col(&b, &x, k, xk.col(0))?;
        ctx.spoil(&mut got);
        worst = worst.max(rel_diff(&got, &inverse_via_factor(&x.insert_cols(k - 1, &xk))?));
    }
    Ok(worst)
}

fn check_gram_delete(ctx: &mut Ctx) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for _ in 0..ctx.cases {
        let (n, p, _) = ctx.shape();
        let x = ctx.gaussian(n, p);
        let k = ctx.rng.gen_range(1..=p);
        let mut got = gram_inverse_delete_col(&inverse_via_factor(&x)?, k)?;
        ctx.spoil(&mut got);
        worst = worst.max(rel_diff(&got, &inverse_via_factor(&x.remove_cols(k - 1, 1))?));
    }
    Ok(worst)
}

/// Largest absolute gap between counted and predicted operations.
fn check_flops(ctx: &mut Ctx) -> Result<f64> {
    let mut worst = 0u64;
    let seed = ctx.rng.gen();
    for &n in &[16usize, 32] {
        for &p in &[4usize, 8] {
            for op in Operation::ALL {
                for &m in &[1usize, 2, 3] {
                    let ks: Vec<usize> = [1, p / 2, p - m + 1, p + 1, n / 2, n - m + 1, n + 1].to_vec();
                    for k in ks {
                        let q = if matches!(op, Operation::QrDelColsNonAdj | Operation::RDelColsNonAdj) {
                            CostQuery::nonadjacent(op, n, p, (0..m).map(|i| (k + 2 * i).min(p)).collect())
                        } else {
                            CostQuery::new(op, n, p, m, k)
                        };
                        if q.validate().is_err() {
                            continue;
                        }
                        let measured = measure_cost(&q, seed)?;
                        worst = worst.max(measured.abs_diff(predict_cost(&q)?));
                    }
                }
            }
            let (_, fc) = counted::backward_substitution(&RFactor::from_design(&ctx.gaussian(n, p))?.into_matrix(), &vec![1.0; p])?;
            worst = worst.max(fc.total().abs_diff((p * p) as u64));
        }
    }
    Ok(ctx.spoil_value(worst as f64, 1.0))
}

fn simulated(ctx: &mut Ctx, n: usize, p: usize, p0: usize, sigma2: f64) -> Result<(Dataset, qrkit_bayes::Hyperparams)> {
    use qrkit_bayes::data::{generate_design, generate_response, Structure};
    let seed = ctx.rng.gen();
    let x = generate_design(n, p, Structure::Independent, 0.0, seed)?;
    let (y, _) = generate_response(&x, p0, sigma2, seed ^ 1)?;
    let hp = default_hyperparams(n, p, sample_variance(&y))?;
    Ok((Dataset::new(x, y)?, hp))
}

fn check_audit(ctx: &mut Ctx) -> Result<f64> {
    let (data, hp) = simulated(ctx, 120, 40, 8, 1.0)?;
    let mut s = Sampler::new(&data, hp, PriorConfig::default(), ctx.rng.gen(), 0)?;
    let mut worst: f64 = 0.0;
    for t in 1..=ctx.cases * 400 {
        s.step(&data);
        if t % 1000 == 0 {
            let cached = ctx.spoil_value(s.state().log_ml, 1e-3);
            let fresh = ModelState::from_scratch(&data, &s.state().cols, &hp)?;
            worst = worst.max((cached - fresh.log_ml).abs() / fresh.log_ml.abs().max(1.0));
            s.audit(&data)?;
        }
    }
    Ok(worst)
}

fn check_enumeration(ctx: &mut Ctx) -> Result<f64> {
    let (data, hp) = simulated(ctx, 80, 8, 3, 20.0)?;
    let exact = enumerate_posterior(&data, &hp, &PriorConfig::default())?;
    let cfg = ChainConfig::new(100_000, ctx.rng.gen());
    let s = run_chain(&data, &hp, &cfg)?;
    let worst = exact.iter().map(|m| (m.prob - s.frequency_of(&m.cols)).abs()).fold(0.0, f64::max);
    Ok(ctx.spoil_value(worst, 0.05))
}

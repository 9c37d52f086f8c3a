//! Q-free updating of the square triangular factor `R₁`, plus bordered
//! Sherman–Morrison maintenance of `(XᵀX)⁻¹`.

use crate::error::{check_pos, Error, Result};
use crate::flops::FlopCounter;
use crate::linalg::{
    forward_substitution_transposed_counted, givens_counted, householder_counted, reflect_rows, scaled, RFactor,
};
use crate::matrix::{dot, DenseMatrix};
use crate::qr_update::{check_positions, plan_nonadjacent};

const DOWNDATE_TOL: f64 = 1e-10;
const DEPENDENCE_TOL: f64 = 1e-8;

/// Factor of `R₁ᵀR₁ + UᵀU`. Row positions do not matter for `R₁`.
pub fn r_add_rows(r1: &RFactor, u: &DenseMatrix) -> Result<RFactor> {
    r_add_rows_counted(r1, u, &mut FlopCounter::new())
}

pub(crate) fn r_add_rows_counted(r1: &RFactor, u: &DenseMatrix, fc: &mut FlopCounter) -> Result<RFactor> {
    let p = r1.dim();
    let m = u.nrows();
    if u.ncols() != p || m == 0 {
        return Err(Error::DimensionMismatch(format!(
            "rows are {}×{}, expected m×{p} with m ≥ 1",
            m,
            u.ncols()
        )));
    }
    let mut out = r1.clone();
    let r = out.matrix_mut();
    if m == 1 {
        let mut x = u.row(0);
        for i in 0..p {
            let g = givens_counted(r[(i, i)], x[i], fc);
            r[(i, i)] = g.c * r[(i, i)] - g.s * x[i];
            fc.mul(2);
            fc.sub(1);
            for j in (i + 1)..p {
                let (a, b) = g.rotate(r[(i, j)], x[j]);
                r[(i, j)] = a;
                x[j] = b;
            }
            let rest = p - i - 1;
            fc.mul(4 * rest);
            fc.sub(rest);
            fc.add(rest);
        }
        return Ok(out);
    }
    let mut uu = u.clone();
    for i in 0..p.saturating_sub(1) {
        let h = householder_counted(r[(i, i)], uu.col(i), fc);
        let v = &h.v[1..];
        r[(i, i)] = h.mu;
        for j in (i + 1)..p {
            let w = h.tau * (r[(i, j)] + dot(v, uu.col(j)));
            r[(i, j)] -= w;
            for (e, vi) in uu.col_mut(j).iter_mut().zip(v) {
                *e -= vi * w;
            }
        }
        let cols = p - i - 1;
        fc.mul(m * cols);
        fc.add((m - 1) * cols);
        fc.add(cols);
        fc.mul(cols);
        fc.sub(cols);
        fc.mul(m * cols);
        fc.sub(m * cols);
    }
    if p > 0 {
        let last = uu.col(p - 1);
        r[(p - 1, p - 1)] = (r[(p - 1, p - 1)] * r[(p - 1, p - 1)] + dot(last, last)).sqrt();
        fc.dot(m);
        fc.mul(1);
        fc.add(1);
        fc.sqrt(1);
    }
    Ok(out)
}

/// Factor of `R₁ᵀR₁ − UᵀU` where `U` holds rows previously part of the data.
pub fn r_delete_rows(r1: &RFactor, u: &DenseMatrix) -> Result<RFactor> {
    r_delete_rows_counted(r1, u, &mut FlopCounter::new())
}

pub(crate) fn r_delete_rows_counted(r1: &RFactor, u: &DenseMatrix, fc: &mut FlopCounter) -> Result<RFactor> {
    let p = r1.dim();
    let m = u.nrows();
    if u.ncols() != p || m == 0 {
        return Err(Error::DimensionMismatch(format!(
            "rows are {}×{}, expected m×{p} with m ≥ 1",
            m,
            u.ncols()
        )));
    }
    let floor = -DOWNDATE_TOL * r1.matrix().frobenius_norm().powi(2);
    let mut out = r1.clone();
    let r = out.matrix_mut();
    if m == 1 {
        let mut x = u.row(0);
        for i in 0..p {
            let old = r[(i, i)];
            let d = old * old - x[i] * x[i];
            fc.mul(2);
            fc.sub(1);
            fc.sqrt(1);
            if d < floor {
                return Err(Error::DowndateBreakdown { index: i + 1, value: d });
            }
            r[(i, i)] = d.abs().sqrt();
            if i + 1 < p {
                if old == 0.0 {
                    return Err(Error::SingularTriangular(i + 1));
                }
                let c = r[(i, i)] / old;
                let s = -x[i] / old;
                fc.div(2);
                for j in (i + 1)..p {
                    let rij = (r[(i, j)] + s * x[j]) / c;
                    r[(i, j)] = rij;
                    x[j] = s * rij + c * x[j];
                }
                let rest = p - i - 1;
                fc.mul(rest);
                fc.add(rest);
                fc.div(rest);
                fc.mul(2 * rest);
                fc.add(rest);
            }
        }
        return Ok(out);
    }
    let mut uu = u.clone();
    for i in 0..p {
        let ui = uu.col(i).to_vec();
        let s = dot(&ui, &ui);
        fc.dot(m);
        let old = r[(i, i)];
        let d = old * old - s;
        fc.mul(1);
        fc.sub(1);
        fc.sqrt(1);
        if d < floor {
            return Err(Error::DowndateBreakdown { index: i + 1, value: d });
        }
        r[(i, i)] = d.abs().sqrt();
        if i + 1 == p {
            break;
        }
        let v1 = r[(i, i)] - old;
        let b = v1 * v1;
        fc.sub(1);
        fc.mul(1);
        let (tau, v): (f64, Vec<f64>) = if b + s == 0.0 {
            (0.0, vec![0.0; m])
        } else {
            (2.0 * b / (b + s), ui.iter().map(|e| e / v1).collect())
        };
        fc.mul(1);
        fc.add(1);
        fc.div(1);
        fc.div(m);
        let denom = 1.0 - tau;
        fc.sub(1);
        for j in (i + 1)..p {
            let w = tau * dot(uu.col(j), &v);
            let row = (r[(i, j)] + w) / denom;
            r[(i, j)] = row;
            let l = tau * row + w;
            for (e, vi) in uu.col_mut(j).iter_mut().zip(&v) {
                *e -= vi * l;
            }
        }
        let cols = p - i - 1;
        // w: m·cols products, (m − 1)·cols sums, cols scalings
        fc.mul(m * cols);
        fc.add((m - 1) * cols);
        fc.mul(cols);
        // row: one sum and one division per column
        fc.add(cols);
        fc.div(cols);
        // U update: τ·row + w, then the rank-one correction
        fc.mul(cols);
        fc.add(cols);
        fc.mul(m * cols);
        fc.sub(m * cols);
    }
    Ok(out)
}

/// Appends the columns `V` (`N × m`) at the right end of `X`.
pub fn r_add_cols(r1: &RFactor, x: &DenseMatrix, v: &DenseMatrix) -> Result<RFactor> {
    r_add_cols_counted(r1, x, v, &mut FlopCounter::new())
}

pub(crate) fn r_add_cols_counted(r1: &RFactor, x: &DenseMatrix, v: &DenseMatrix, fc: &mut FlopCounter) -> Result<RFactor> {
    let p = r1.dim();
    let n = x.nrows();
    if x.ncols() != p || v.nrows() != n || v.ncols() == 0 {
        return Err(Error::DimensionMismatch(format!(
            "R₁ is {p}×{p}, X is {}×{}, V is {}×{}",
            x.nrows(),
            x.ncols(),
            v.nrows(),
            v.ncols()
        )));
    }
    let m = v.ncols();
    let xtv = x.t_matmul(v);
    fc.mul(p * m * n);
    fc.add(p * m * (n - 1));
    let vtv = v.t_matmul(v);
    add_cols_core(r1, &xtv, &vtv, Some(n), fc)
}

/// Same as [`r_add_cols`] but from the cross products `XᵀV` and `VᵀV`.
///
/// The Bayesian sampler uses this with a ridge-augmented design whose
/// cross products are cheaper to form directly.
pub fn r_add_cols_cross(r1: &RFactor, xtv: &DenseMatrix, vtv: &DenseMatrix) -> Result<RFactor> {
    let p = r1.dim();
    let m = vtv.nrows();
    if xtv.shape() != (p, m) || vtv.ncols() != m || m == 0 {
        return Err(Error::DimensionMismatch(format!(
            "cross products are {}×{} and {}×{} for p = {p}",
            xtv.nrows(),
            xtv.ncols(),
            vtv.nrows(),
            vtv.ncols()
        )));
    }
    add_cols_core(r1, xtv, vtv, None, &mut FlopCounter::new())
}

/// `n` is the row count of the design when inner products `VᵢᵀVⱼ` are
/// charged as length-`n` dots; `None` treats them as given.
fn add_cols_core(
    r1: &RFactor,
    xtv: &DenseMatrix,
    vtv: &DenseMatrix,
    n: Option<usize>,
    fc: &mut FlopCounter,
) -> Result<RFactor> {
    let p = r1.dim();
    let m = vtv.nrows();
    let floor = -DEPENDENCE_TOL * (0..m).map(|j| vtv[(j, j)]).sum::<f64>();
    let inner = |fc: &mut FlopCounter| {
        if let Some(n) = n {
            fc.dot(n);
        }
    };
    let mut r12 = DenseMatrix::zeros(p, m);
    for j in 0..m {
        let z = if p > 0 {
            forward_substitution_transposed_counted(r1.matrix(), xtv.col(j), fc)?
        } else {
            Vec::new()
        };
        r12.col_mut(j).copy_from_slice(&z);
    }
    let mut r22 = DenseMatrix::zeros(m, m);
    for i in 0..m {
        inner(fc);
        fc.dot(p);
        fc.dot(i);
        let d = vtv[(i, i)] - dot(r12.col(i), r12.col(i)) - dot(&r22.col(i)[..i], &r22.col(i)[..i]);
        fc.sub(if i == 0 { 1 } else { 2 });
        fc.sqrt(1);
        if d < floor {
            return Err(Error::NearDependentColumn { index: p + i + 1, value: d });
        }
        let dii = d.abs().sqrt();
        r22[(i, i)] = dii;
        for j in (i + 1)..m {
            inner(fc);
            fc.dot(p);
            fc.dot(i);
            fc.sub(if i == 0 { 1 } else { 2 });
            fc.div(1);
            let num = vtv[(i, j)] - dot(r12.col(i), r12.col(j)) - dot(&r22.col(i)[..i], &r22.col(j)[..i]);
            r22[(i, j)] = num / dii;
        }
    }
    let size = p + m;
    let mut out = DenseMatrix::zeros(size, size);
    for j in 0..p {
        for i in 0..=j {
            out[(i, j)] = r1.matrix()[(i, j)];
        }
    }
    for j in 0..m {
        for i in 0..p {
            out[(i, p + j)] = r12[(i, j)];
        }
        for i in 0..=j {
            out[(p + i, p + j)] = r22[(i, j)];
        }
    }
    Ok(RFactor::from_upper(out))
}

/// Removes columns `k..k+m−1` (1-based).
pub fn r_delete_cols(r1: &RFactor, k: usize, m: usize) -> Result<RFactor> {
    r_delete_cols_counted(r1, k, m, &mut FlopCounter::new())
}

pub(crate) fn r_delete_cols_counted(r1: &RFactor, k: usize, m: usize, fc: &mut FlopCounter) -> Result<RFactor> {
    let p = r1.dim();
    if m == 0 || m > p {
        return Err(Error::DimensionMismatch(format!("cannot delete {m} of {p} columns")));
    }
    check_pos(k, 1, p - m + 1)?;
    let pm = p - m;
    if k == pm + 1 {
        return Ok(RFactor::from_upper(r1.matrix().submatrix(0, pm, 0, pm)));
    }
    let k0 = k - 1;
    let mut r = r1.matrix().remove_cols(k0, m);
    if m == 1 {
        for i in k0..pm {
            let g = givens_counted(r[(i, i)], r[(i + 1, i)], fc);
            r[(i, i)] = g.c * r[(i, i)] - g.s * r[(i + 1, i)];
            fc.mul(2);
            fc.sub(1);
            r[(i + 1, i)] = 0.0;
            for j in (i + 1)..pm {
                let (a, b) = g.rotate(r[(i, j)], r[(i + 1, j)]);
                r[(i, j)] = a;
                r[(i + 1, j)] = b;
            }
            let rest = pm - i - 1;
            fc.mul(4 * rest);
            fc.sub(rest);
            fc.add(rest);
        }
    } else {
        for i in k0..pm - 1 {
            let below = r.col(i)[i + 1..i + 1 + m].to_vec();
            let h = householder_counted(r[(i, i)], &below, fc);
            r[(i, i)] = h.mu;
            for e in &mut r.col_mut(i)[i + 1..i + 1 + m] {
                *e = 0.0;
            }
            let vs = scaled(h.tau, &h.v, fc);
            reflect_rows(&mut r, i, (i + 1)..pm, &vs, &h.v, fc);
        }
        let last = &r.col(pm - 1)[pm - 1..pm + m];
        let norm = dot(last, last).sqrt();
        fc.dot(m + 1);
        fc.sqrt(1);
        r[(pm - 1, pm - 1)] = norm;
    }
    Ok(RFactor::from_upper(r.submatrix(0, pm, 0, pm)))
}

fn thinqrstep_in_place(r: &mut DenseMatrix, i: usize, a: usize, fc: &mut FlopCounter) {
    let l = r.ncols();
    if a > 1 {
        let below = r.col(i)[i + 1..i + 1 + a].to_vec();
        let h = householder_counted(r[(i, i)], &below, fc);
        r[(i, i)] = h.mu;
        let vs = scaled(h.tau, &h.v, fc);
        reflect_rows(r, i, (i + 1)..l, &vs, &h.v, fc);
        for e in &mut r.col_mut(i)[i + 1..i + 1 + a] {
            *e = 0.0;
        }
    } else {
        let g = givens_counted(r[(i, i)], r[(i + 1, i)], fc);
        r[(i, i)] = g.c * r[(i, i)] - g.s * r[(i + 1, i)];
        fc.mul(2);
        fc.sub(1);
        r[(i + 1, i)] = 0.0;
        for j in (i + 1)..l {
            let (x, y) = g.rotate(r[(i, j)], r[(i + 1, j)]);
            r[(i, j)] = x;
            r[(i + 1, j)] = y;
        }
        let rest = l - i - 1;
        fc.mul(4 * rest);
        fc.sub(rest);
        fc.add(rest);
    }
}

/// Re-triangularizes column `i` (1-based) of a `p × l` matrix whose column
/// has `a` nonzeros below the diagonal.
pub fn thinqrstep(r: &DenseMatrix, i: usize, a: usize) -> Result<DenseMatrix> {
    let (rows, l) = r.shape();
    check_pos(i, 1, l)?;
    if a == 0 || i + a > rows {
        return Err(Error::PositionOutOfRange { pos: a, lo: 1, hi: rows.saturating_sub(i) });
    }
    let mut out = r.clone();
    thinqrstep_in_place(&mut out, i - 1, a, &mut FlopCounter::new());
    Ok(out)
}

/// Removes the columns at sorted 1-based positions `ks`.
pub fn r_delete_cols_nonadjacent(r1: &RFactor, ks: &[usize]) -> Result<RFactor> {
    r_delete_cols_nonadjacent_counted(r1, ks, &mut FlopCounter::new())
}

pub(crate) fn r_delete_cols_nonadjacent_counted(r1: &RFactor, ks: &[usize], fc: &mut FlopCounter) -> Result<RFactor> {
    let p = r1.dim();
    check_positions(ks, p)?;
    let m = ks.len();
    if m == 1 || ks[m - 1] - ks[0] == m - 1 {
        return r_delete_cols_counted(r1, ks[0], m, fc);
    }
    let plan = plan_nonadjacent(ks, p);
    fc.sub(2);
    let (l, q) = (plan.l, plan.q);
    let ks = &ks[..q];
    if q == 1 || ks[q - 1] - ks[0] == q - 1 {
        let trimmed = RFactor::from_upper(r1.matrix().submatrix(0, l, 0, l));
        return r_delete_cols_counted(&trimmed, ks[0], q, fc);
    }
    let cols: Vec<usize> = plan.kbar.iter().map(|c| c - 1).collect();
    let mut r = r1.matrix().submatrix(0, l, 0, p).select_cols(&cols);
    let width = l - q;
    let k1 = ks[0];
    let kb = &plan.kbar[k1 - 1..width];
    let steps = width - k1;
    let mut a = kb[0] - k1;
    fc.sub(1);
    for i in 1..=steps {
        thinqrstep_in_place(&mut r, i + k1 - 2, a, fc);
        a = a + kb[i] - kb[i - 1] - 1;
        fc.sub(2);
        fc.add(1);
    }
    let last = &r.col(width - 1)[width - 1..l];
    let norm = dot(last, last).sqrt();
    fc.dot(q + 1);
    fc.sqrt(1);
    r[(width - 1, width - 1)] = norm;
    Ok(RFactor::from_upper(r.submatrix(0, width, 0, width)))
}

/// `((X⁺)ᵀX⁺)⁻¹` after inserting `xk` as column `k` (1-based) of `X`.
pub fn gram_inverse_add_col(b: &DenseMatrix, x: &DenseMatrix, k: usize, xk: &[f64]) -> Result<DenseMatrix> {
    let p = b.nrows();
    if b.ncols() != p || x.ncols() != p || x.nrows() != xk.len() {
        return Err(Error::DimensionMismatch(format!(
            "B is {}×{}, X is {}×{}, x has {} entries",
            b.nrows(),
            b.ncols(),
            x.nrows(),
            x.ncols(),
            xk.len()
        )));
    }
    check_pos(k, 1, p + 1)?;
    let u1 = x.t_mat_vec(xk);
    let u2 = b.mat_vec(&u1);
    let xtx = dot(xk, xk);
    let schur = xtx - dot(&u1, &u2);
    if schur <= 1e-12 * xtx {
        return Err(Error::SingularUpdate(schur));
    }
    let d = 1.0 / schur;
    let u3: Vec<f64> = u2.iter().map(|e| d * e).collect();
    let mut out = DenseMatrix::zeros(p + 1, p + 1);
    for j in 0..p {
        for i in 0..p {
            out[(i, j)] = b[(i, j)] + u3[i] * u2[j];
        }
        out[(p, j)] = -u3[j];
        out[(j, p)] = -u3[j];
    }
    out[(p, p)] = d;
    let order: Vec<usize> = (0..k - 1).chain(std::iter::once(p)).chain(k - 1..p).collect();
    Ok(out.select_rows(&order).select_cols(&order))
}

/// `(XᵀX)⁻¹` after deleting column `k` (1-based), from `B = (XᵀX)⁻¹` alone.
pub fn gram_inverse_delete_col(b: &DenseMatrix, k: usize) -> Result<DenseMatrix> {
    let p = b.nrows();
    if b.ncols() != p || p == 0 {
        return Err(Error::DimensionMismatch(format!("B is {}×{}", b.nrows(), b.ncols())));
    }
    check_pos(k, 1, p)?;
    let order: Vec<usize> = (0..p).filter(|&i| i != k - 1).chain(std::iter::once(k - 1)).collect();
    let bp = b.select_rows(&order).select_cols(&order);
    let d = bp[(p - 1, p - 1)];
    if d == 0.0 {
        return Err(Error::SingularUpdate(d));
    }
    let u3: Vec<f64> = (0..p - 1).map(|i| bp[(i, p - 1)]).collect();
    let u2: Vec<f64> = u3.iter().map(|e| e / d).collect();
    Ok(DenseMatrix::from_fn(p - 1, p - 1, |i, j| bp[(i, j)] - u3[i] * u2[j]))
}

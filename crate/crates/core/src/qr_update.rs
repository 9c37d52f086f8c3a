//! Updating and downdating of a full `Q R` factorization.
//!
//! Positions `k` are 1-based: `k` is the index the first inserted (or
//! deleted) row or column occupies in the modified matrix.

use crate::error::{check_pos, Error, Result};
use crate::flops::FlopCounter;
use crate::linalg::{givens_counted, householder_counted, reflect_cols, reflect_rows, scaled, QrFactors};
use crate::matrix::DenseMatrix;

/// Moves `m` consecutive rows so the block starting at `from` starts at `to`.
///
/// Both positions are 1-based and refer to the block's first row before and
/// after the move. Used to turn non-contiguous row edits into block edits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RowPermutationPlan {
    pub m: usize,
    pub from: usize,
    pub to: usize,
}

impl RowPermutationPlan {
    /// Source row (0-based) for every destination row.
    pub fn source_rows(&self, n: usize) -> Vec<usize> {
        assert!(self.m >= 1 && self.from >= 1 && self.to >= 1);
        assert!(self.from + self.m - 1 <= n && self.to + self.m - 1 <= n);
        let block: Vec<usize> = (self.from - 1..self.from - 1 + self.m).collect();
        let mut rest: Vec<usize> = (0..n).filter(|r| !block.contains(r)).collect();
        let tail = rest.split_off(self.to - 1);
        rest.extend(block);
        rest.extend(tail);
        rest
    }

    pub fn apply(&self, x: &DenseMatrix) -> DenseMatrix {
        x.select_rows(&self.source_rows(x.nrows()))
    }
}

fn check_factors(f: &QrFactors) -> Result<(usize, usize)> {
    let (n, p) = f.r.shape();
    if f.q.shape() != (n, n) {
        return Err(Error::DimensionMismatch(format!(
            "Q is {}×{} but R has {n} rows",
            f.q.nrows(),
            f.q.ncols()
        )));
    }
    if p > n {
        return Err(Error::DimensionMismatch(format!("R is {n}×{p}, need p ≤ N")));
    }
    Ok((n, p))
}

fn rotate_rows(r: &mut DenseMatrix, a: usize, b: usize, cols: std::ops::Range<usize>, g: crate::GivensRotation, fc: &mut FlopCounter) {
    let len = cols.len();
    for j in cols {
        let (x, y) = g.rotate(r[(a, j)], r[(b, j)]);
        r[(a, j)] = x;
        r[(b, j)] = y;
    }
    fc.mul(4 * len);
    fc.sub(len);
    fc.add(len);
}

fn rotate_cols(q: &mut DenseMatrix, a: usize, b: usize, rows: std::ops::Range<usize>, g: crate::GivensRotation, fc: &mut FlopCounter) {
    let len = rows.len();
    for i in rows {
        let (x, y) = g.rotate(q[(i, a)], q[(i, b)]);
        q[(i, a)] = x;
        q[(i, b)] = y;
    }
    fc.mul(4 * len);
    fc.sub(len);
    fc.add(len);
}

/// `c·a − s·b`, charged 3.
#[inline]
fn lead(g: crate::GivensRotation, a: f64, b: f64, fc: &mut FlopCounter) -> f64 {
    fc.mul(2);
    fc.sub(1);
    g.c * a - g.s * b
}

/// Inserts the rows of `u` (`m × p`) so that they occupy rows `k..k+m−1`.
pub fn qr_add_rows(f: &QrFactors, k: usize, u: &DenseMatrix) -> Result<QrFactors> {
    qr_add_rows_counted(f, k, u, &mut FlopCounter::new())
}

pub(crate) fn qr_add_rows_counted(f: &QrFactors, k: usize, u: &DenseMatrix, fc: &mut FlopCounter) -> Result<QrFactors> {
    let (n, p) = check_factors(f)?;
    if u.ncols() != p || u.nrows() == 0 {
        return Err(Error::DimensionMismatch(format!(
            "new rows are {}×{}, expected m×{p} with m ≥ 1",
            u.nrows(),
            u.ncols()
        )));
    }
    check_pos(k, 1, n + 1)?;
    let m = u.nrows();
    // Q⁺ = [Q 0; 0 I] with the identity rows moved to position k.
    let mut q = DenseMatrix::zeros(n + m, n + m);
    for j in 0..n {
        for i in 0..n {
            let dst = if i < k - 1 { i } else { i + m };
            q[(dst, j)] = f.q[(i, j)];
        }
    }
    for t in 0..m {
        q[(k - 1 + t, n + t)] = 1.0;
    }
    let mut r = f.r.clone();
    if m == 1 {
        let mut x = u.row(0);
        for i in 0..p {
            let g = givens_counted(r[(i, i)], x[i], fc);
            r[(i, i)] = lead(g, r[(i, i)], x[i], fc);
            for j in (i + 1)..p {
                let (a, b) = g.rotate(r[(i, j)], x[j]);
                r[(i, j)] = a;
                x[j] = b;
            }
            fc.mul(4 * (p - i - 1));
            fc.sub(p - i - 1);
            fc.add(p - i - 1);
            rotate_cols(&mut q, i, n, 0..n + m, g, fc);
        }
    } else {
        let mut uu = u.clone();
        for i in 0..p {
            let h = householder_counted(r[(i, i)], uu.col(i), fc);
            let v = &h.v[1..];
            let v1 = scaled(h.tau, v, fc);
            r[(i, i)] = h.mu;
            if i + 1 < p {
                for j in (i + 1)..p {
                    let w = h.tau * (r[(i, j)] + crate::matrix::dot(v, uu.col(j)));
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
            // q = τ·Q⁺[:, i] + Q⁺[:, N..N+m] v1, then apply the reflector.
            let rows = n + m;
            let mut w: Vec<f64> = q.col(i).iter().map(|x| h.tau * x).collect();
            for (t, &vt) in v1.iter().enumerate() {
                for (wi, qi) in w.iter_mut().zip(q.col(n + t)) {
                    *wi += qi * vt;
                }
            }
            for (qi, wi) in q.col_mut(i).iter_mut().zip(&w) {
                *qi -= wi;
            }
            for (t, &vt) in v.iter().enumerate() {
                for (qi, wi) in q.col_mut(n + t).iter_mut().zip(&w) {
                    *qi -= wi * vt;
                }
            }
            fc.mul(rows);
            fc.mul(rows * m);
            fc.add(rows * m);
            fc.sub(rows);
            fc.mul(rows * m);
            fc.sub(rows * m);
        }
    }
    let r = r.insert_rows(n, &DenseMatrix::zeros(m, p));
    Ok(QrFactors { q, r })
}

/// Removes rows `k..k+m−1`.
pub fn qr_delete_rows(f: &QrFactors, k: usize, m: usize) -> Result<QrFactors> {
    qr_delete_rows_counted(f, k, m, &mut FlopCounter::new())
}

pub(crate) fn qr_delete_rows_counted(f: &QrFactors, k: usize, m: usize, fc: &mut FlopCounter) -> Result<QrFactors> {
    let (n, p) = check_factors(f)?;
    if m == 0 || m >= n {
        return Err(Error::DimensionMismatch(format!("cannot delete {m} of {n} rows")));
    }
    if n - m < p {
        return Err(Error::WouldUnderdetermine { n, m, p });
    }
    check_pos(k, 1, n - m + 1)?;
    let k0 = k - 1;
    let mut r = f.r.clone();
    if m == 1 {
        let mut qv = f.q.row(k0);
        let order: Vec<usize> = std::iter::once(k0).chain((0..n).filter(|&i| i != k0)).collect();
        let mut q = f.q.select_rows(&order);
        for i in (1..n).rev() {
            let g = givens_counted(qv[i - 1], qv[i], fc);
            qv[i - 1] = lead(g, qv[i - 1], qv[i], fc);
            qv[i] = 0.0;
            if i - 1 < p {
                rotate_rows(&mut r, i - 1, i, (i - 1)..p, g, fc);
            }
            if i > 1 {
                rotate_cols(&mut q, i - 1, i, 1..n, g, fc);
            } else {
                // Column 0 is discarded; only the survivor needs updating.
                for row in 1..n {
                    q[(row, 1)] = g.s * q[(row, 0)] + g.c * q[(row, 1)];
                }
                fc.mul(2 * (n - 1));
                fc.add(n - 1);
            }
        }
        return Ok(QrFactors {
            q: q.submatrix(1, n, 1, n),
            r: r.submatrix(1, n, 0, p),
        });
    }
    let block: Vec<usize> = (k0..k0 + m).collect();
    let rest: Vec<usize> = (0..n).filter(|i| !block.contains(i)).collect();
    let mut w = f.q.select_rows(&block);
    let mut q = f.q.select_rows(&rest);
    for j in 0..m {
        for a in (j..n - 1).rev() {
            let g = givens_counted(w[(j, a)], w[(j, a + 1)], fc);
            w[(j, a)] = lead(g, w[(j, a)], w[(j, a + 1)], fc);
            w[(j, a + 1)] = 0.0;
            if j + 1 < m {
                rotate_cols(&mut w, a, a + 1, (j + 1)..m, g, fc);
            }
            if a < p + j {
                rotate_rows(&mut r, a, a + 1, (a - j)..p, g, fc);
            }
            rotate_cols(&mut q, a, a + 1, 0..n - m, g, fc);
        }
    }
    Ok(QrFactors {
        q: q.submatrix(0, n - m, m, n),
        r: r.submatrix(m, n, 0, p),
    })
}

/// Inserts the columns of `v` (`N × m`) so that they occupy columns `k..k+m−1`.
pub fn qr_add_cols(f: &QrFactors, k: usize, v: &DenseMatrix) -> Result<QrFactors> {
    qr_add_cols_counted(f, k, v, &mut FlopCounter::new())
}

pub(crate) fn qr_add_cols_counted(f: &QrFactors, k: usize, v: &DenseMatrix, fc: &mut FlopCounter) -> Result<QrFactors> {
    let (n, p) = check_factors(f)?;
    let m = v.ncols();
    if v.nrows() != n || m == 0 {
        return Err(Error::DimensionMismatch(format!(
            "new columns are {}×{m}, expected {n}×m with m ≥ 1",
            v.nrows()
        )));
    }
    if p + m > n {
        return Err(Error::DimensionMismatch(format!("p + m = {} exceeds N = {n}", p + m)));
    }
    check_pos(k, 1, p + 1)?;
    let k0 = k - 1;
    let mut q = f.q.clone();
    let mut r = f.r.clone();
    let mut z = q.t_matmul(v);
    fc.mul(n * n * m);
    fc.add(n * m * (n - 1));
    for j in 0..m {
        for b in (k0 + j + 1..n).rev() {
            let g = givens_counted(z[(b - 1, j)], z[(b, j)], fc);
            z[(b - 1, j)] = lead(g, z[(b - 1, j)], z[(b, j)], fc);
            z[(b, j)] = 0.0;
            if j + 1 < m {
                rotate_rows(&mut z, b - 1, b, (j + 1)..m, g, fc);
            }
            if b <= p + j {
                rotate_rows(&mut r, b - 1, b, (b - j - 1)..p, g, fc);
            }
            rotate_cols(&mut q, b - 1, b, 0..n, g, fc);
        }
    }
    Ok(QrFactors { q, r: r.insert_cols(k0, &z) })
}

/// Removes columns `k..k+m−1`.
pub fn qr_delete_cols(f: &QrFactors, k: usize, m: usize) -> Result<QrFactors> {
    qr_delete_cols_counted(f, k, m, &mut FlopCounter::new())
}

pub(crate) fn qr_delete_cols_counted(f: &QrFactors, k: usize, m: usize, fc: &mut FlopCounter) -> Result<QrFactors> {
    let (n, p) = check_factors(f)?;
    if m == 0 || m > p {
        return Err(Error::DimensionMismatch(format!("cannot delete {m} of {p} columns")));
    }
    check_pos(k, 1, p - m + 1)?;
    let k0 = k - 1;
    if k == p - m + 1 {
        return Ok(QrFactors {
            q: f.q.clone(),
            r: f.r.submatrix(0, n, 0, k0),
        });
    }
    let mut q = f.q.clone();
    let mut r = f.r.remove_cols(k0, m);
    let pm = p - m;
    if m == 1 {
        for i in k0..pm {
            let g = givens_counted(r[(i, i)], r[(i + 1, i)], fc);
            r[(i, i)] = lead(g, r[(i, i)], r[(i + 1, i)], fc);
            r[(i + 1, i)] = 0.0;
            if i + 1 < pm {
                rotate_rows(&mut r, i, i + 1, (i + 1)..pm, g, fc);
            }
            rotate_cols(&mut q, i, i + 1, 0..n, g, fc);
        }
    } else {
        for i in k0..pm {
            let below = r.col(i)[i + 1..i + 1 + m].to_vec();
            let h = householder_counted(r[(i, i)], &below, fc);
            r[(i, i)] = h.mu;
            for e in &mut r.col_mut(i)[i + 1..i + 1 + m] {
                *e = 0.0;
            }
            let vs = scaled(h.tau, &h.v, fc);
            reflect_rows(&mut r, i, (i + 1)..pm, &vs, &h.v, fc);
            reflect_cols(&mut q, i, &vs, &h.v, fc);
        }
    }
    Ok(QrFactors { q, r })
}

/// Re-triangularizes column `i` (1-based) of `R`, which has `a` nonzeros
/// below the diagonal, using one rotation (`a = 1`) or one reflector.
pub fn qrstep(f: &QrFactors, i: usize, a: usize) -> Result<QrFactors> {
    let (n, l) = f.r.shape();
    if f.q.shape() != (n, n) {
        return Err(Error::DimensionMismatch("Q and R row counts differ".into()));
    }
    check_pos(i, 1, l)?;
    if a == 0 || i + a > n {
        return Err(Error::PositionOutOfRange { pos: a, lo: 1, hi: n.saturating_sub(i) });
    }
    let mut out = f.clone();
    qrstep_in_place(&mut out, i - 1, a, &mut FlopCounter::new());
    Ok(out)
}

pub(crate) fn qrstep_in_place(f: &mut QrFactors, i: usize, a: usize, fc: &mut FlopCounter) {
    let l = f.r.ncols();
    let r = &mut f.r;
    if a > 1 {
        let below = r.col(i)[i + 1..i + 1 + a].to_vec();
        let h = householder_counted(r[(i, i)], &below, fc);
        let vs = scaled(h.tau, &h.v, fc);
        r[(i, i)] = h.mu;
        for e in &mut r.col_mut(i)[i + 1..i + 1 + a] {
            *e = 0.0;
        }
        reflect_rows(r, i, (i + 1)..l, &vs, &h.v, fc);
        reflect_cols(&mut f.q, i, &vs, &h.v, fc);
    } else {
        let g = givens_counted(r[(i, i)], r[(i + 1, i)], fc);
        r[(i, i)] = lead(g, r[(i, i)], r[(i + 1, i)], fc);
        r[(i + 1, i)] = 0.0;
        rotate_rows(r, i, i + 1, (i + 1)..l, g, fc);
        let n = f.q.nrows();
        rotate_cols(&mut f.q, i, i + 1, 0..n, g, fc);
    }
}

/// Validates a sorted 1-based position list against `p` columns.
pub(crate) fn check_positions(ks: &[usize], p: usize) -> Result<()> {
    if ks.is_empty() || ks.len() >= p {
        return Err(Error::DimensionMismatch(format!(
            "need 1 ≤ |ks| < p, got {} positions for p = {p}",
            ks.len()
        )));
    }
    for (t, &k) in ks.iter().enumerate() {
        check_pos(k, 1, p)?;
        if t > 0 && k <= ks[t - 1] {
            return Err(Error::DuplicatePosition(k));
        }
    }
    Ok(())
}

/// Bookkeeping shared by the full and thin non-adjacent deletions.
pub(crate) struct NonAdjacentPlan {
    /// Kept columns (1-based), all of them.
    pub kbar: Vec<usize>,
    /// Last kept column.
    pub l: usize,
    /// Number of deleted columns before `l`.
    pub q: usize,
}

pub(crate) fn plan_nonadjacent(ks: &[usize], p: usize) -> NonAdjacentPlan {
    let kbar: Vec<usize> = (1..=p).filter(|c| ks.binary_search(c).is_err()).collect();
    let l = kbar[p - ks.len() - 1];
    let q = ks.len() - (p - l);
    NonAdjacentPlan { kbar, l, q }
}

/// Removes the columns at the sorted 1-based positions `ks`.
pub fn qr_delete_cols_nonadjacent(f: &QrFactors, ks: &[usize]) -> Result<QrFactors> {
    qr_delete_cols_nonadjacent_counted(f, ks, &mut FlopCounter::new())
}

pub(crate) fn qr_delete_cols_nonadjacent_counted(f: &QrFactors, ks: &[usize], fc: &mut FlopCounter) -> Result<QrFactors> {
    let (n, p) = check_factors(f)?;
    check_positions(ks, p)?;
    let m = ks.len();
    if m == 1 || ks[m - 1] - ks[0] == m - 1 {
        return qr_delete_cols_counted(f, ks[0], m, fc);
    }
    let plan = plan_nonadjacent(ks, p);
    fc.sub(2);
    let (l, q) = (plan.l, plan.q);
    let ks = &ks[..q];
    let trimmed = QrFactors {
        q: f.q.clone(),
        r: f.r.submatrix(0, n, 0, l),
    };
    if q == 1 || ks[q - 1] - ks[0] == q - 1 {
        return qr_delete_cols_counted(&trimmed, ks[0], q, fc);
    }
    let cols: Vec<usize> = plan.kbar.iter().map(|c| c - 1).collect();
    let mut out = QrFactors {
        q: trimmed.q,
        r: f.r.select_cols(&cols),
    };
    let k1 = ks[0];
    let kb = &plan.kbar[k1 - 1..l - q];
    let steps = l - q - k1 + 1;
    let mut a = kb[0] - k1;
    fc.sub(1);
    for i in 1..=steps {
        qrstep_in_place(&mut out, i + k1 - 2, a, fc);
        if i < steps {
            a = a + (kb[i] - kb[i - 1]) - 1;
            fc.sub(2);
            fc.add(1);
        }
    }
    Ok(out)
}

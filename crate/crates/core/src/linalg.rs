//! Orthogonal primitives, triangular solves and from-scratch QR.

use crate::error::{Error, Result};
use crate::flops::FlopCounter;
use crate::matrix::DenseMatrix;

/// Plane rotation `G = [[c, s], [-s, c]]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GivensRotation {
    pub c: f64,
    pub s: f64,
}

impl GivensRotation {
    /// Returns `Gᵀ (a, b)ᵀ`, which is also the row vector `(a, b) G`.
    #[inline]
    pub fn rotate(&self, a: f64, b: f64) -> (f64, f64) {
        (self.c * a - self.s * b, self.s * a + self.c * b)
    }
}

/// Givens rotation that annihilates `b` in `Gᵀ (a, b)ᵀ`.
pub fn givens(a: f64, b: f64) -> GivensRotation {
    givens_counted(a, b, &mut FlopCounter::new())
}

/// Always charged 6 operations, whichever branch runs.
pub(crate) fn givens_counted(a: f64, b: f64, fc: &mut FlopCounter) -> GivensRotation {
    fc.div(2);
    fc.mul(2);
    fc.add(1);
    fc.sqrt(1);
    if b == 0.0 {
        return GivensRotation { c: 1.0, s: 0.0 };
    }
    if b.abs() > a.abs() {
        let r = -a / b;
        let s = 1.0 / (1.0 + r * r).sqrt();
        let c = s * r;
        if b > 0.0 {
            GivensRotation { c: -c, s: -s }
        } else {
            GivensRotation { c, s }
        }
    } else {
        let r = -b / a;
        let c = 1.0 / (1.0 + r * r).sqrt();
        let s = c * r;
        if a < 0.0 {
            GivensRotation { c: -c, s: -s }
        } else {
            GivensRotation { c, s }
        }
    }
}

/// Reflector `H = I − τ v vᵀ` with `v[0] = 1`, mapping `(a, x)` to `(μ, 0)`.
#[derive(Clone, Debug, PartialEq)]
pub struct HouseholderReflector {
    pub tau: f64,
    /// Length `m + 1`.
    pub v: Vec<f64>,
    pub mu: f64,
}

impl HouseholderReflector {
    /// Applies `H` to a vector of length `m + 1`.
    pub fn apply(&self, y: &mut [f64]) {
        assert_eq!(y.len(), self.v.len());
        let w = self.tau * crate::matrix::dot(&self.v, y);
        for (yi, vi) in y.iter_mut().zip(&self.v) {
            *yi -= w * vi;
        }
    }
}

pub fn householder(a: f64, x: &[f64]) -> HouseholderReflector {
    householder_counted(a, x, &mut FlopCounter::new())
}

/// Always charged `3m + 9` operations for `x` of length `m`.
///
/// When `x = 0` the returned `v` is the first unit vector, so `τ = 0` is the
/// identity and `τ = 2` negates the leading entry. Callers may therefore
/// apply `v` without looking at the branch.
pub(crate) fn householder_counted(a: f64, x: &[f64], fc: &mut FlopCounter) -> HouseholderReflector {
    let m = x.len();
    fc.mul(m + 3);
    fc.add(m + 3);
    fc.div(m + 2);
    fc.sqrt(1);
    let s: f64 = x.iter().map(|xi| xi * xi).sum();
    let mut v = Vec::with_capacity(m + 1);
    v.push(1.0);
    if s == 0.0 {
        v.extend_from_slice(x);
        return if a >= 0.0 {
            HouseholderReflector { tau: 0.0, v, mu: a }
        } else {
            HouseholderReflector { tau: 2.0, v, mu: -a }
        };
    }
    let mu = (s + a * a).sqrt();
    let v1 = if a <= 0.0 { a - mu } else { -s / (a + mu) };
    let b = v1 * v1;
    let tau = 2.0 * b / (s + b);
    v.extend(x.iter().map(|xi| xi / v1));
    HouseholderReflector { tau, v, mu }
}

/// Full factorization `X = Q R` with `Q` orthogonal `N × N`.
#[derive(Clone, Debug, PartialEq)]
pub struct QrFactors {
    pub q: DenseMatrix,
    pub r: DenseMatrix,
}

impl QrFactors {
    pub fn n(&self) -> usize {
        self.r.nrows()
    }

    pub fn p(&self) -> usize {
        self.r.ncols()
    }

    pub fn reconstruct(&self) -> DenseMatrix {
        self.q.matmul(&self.r)
    }

    /// `‖QᵀQ − I‖_F`.
    pub fn orthogonality_error(&self) -> f64 {
        let n = self.q.nrows();
        self.q.t_matmul(&self.q).sub(&DenseMatrix::identity(n)).frobenius_norm()
    }

    /// Leading `p × p` block of `R`.
    pub fn r1(&self) -> RFactor {
        let p = self.p();
        RFactor::from_upper(self.r.submatrix(0, p, 0, p))
    }
}

/// Square upper-triangular factor `R₁` with `R₁ᵀR₁ = XᵀX`.
#[derive(Clone, Debug, PartialEq)]
pub struct RFactor(DenseMatrix);

impl RFactor {
    /// Wraps a square matrix, discarding anything below the diagonal.
    pub fn from_upper(mut r: DenseMatrix) -> Self {
        assert_eq!(r.nrows(), r.ncols(), "RFactor must be square");
        for j in 0..r.ncols() {
            for i in (j + 1)..r.nrows() {
                r[(i, j)] = 0.0;
            }
        }
        Self(r)
    }

    /// Factor of `XᵀX` computed from scratch by Householder QR.
    pub fn from_design(x: &DenseMatrix) -> Result<Self> {
        Ok(qr_factorize(x)?.r1())
    }

    pub fn empty() -> Self {
        Self(DenseMatrix::zeros(0, 0))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> DenseMatrix {
        self.0
    }

    pub(crate) fn matrix_mut(&mut self) -> &mut DenseMatrix {
        &mut self.0
    }

    /// `R₁ᵀ R₁`.
    pub fn gram(&self) -> DenseMatrix {
        self.0.t_matmul(&self.0)
    }

    pub fn log_abs_det(&self) -> f64 {
        (0..self.dim()).map(|i| self.0[(i, i)].abs().ln()).sum()
    }
}

/// Householder QR of `X` (`N ≥ p`), producing nonnegative diagonal entries.
pub fn qr_factorize(x: &DenseMatrix) -> Result<QrFactors> {
    qr_factorize_counted(x, &mut FlopCounter::new())
}

pub(crate) fn qr_factorize_counted(x: &DenseMatrix, fc: &mut FlopCounter) -> Result<QrFactors> {
    let (n, p) = x.shape();
    if n < p {
        return Err(Error::DimensionMismatch(format!("QR needs N ≥ p, got {n}×{p}")));
    }
    let tol = 1e-12 * x.frobenius_norm();
    let mut r = x.clone();
    let mut q = DenseMatrix::identity(n);
    for i in 0..p {
        let below: Vec<f64> = r.col(i)[i + 1..].to_vec();
        let h = householder_counted(r[(i, i)], &below, fc);
        r[(i, i)] = h.mu;
        for e in &mut r.col_mut(i)[i + 1..] {
            *e = 0.0;
        }
        let vs = scaled(h.tau, &h.v, fc);
        reflect_rows(&mut r, i, (i + 1)..p, &vs, &h.v, fc);
        reflect_cols(&mut q, i, &vs, &h.v, fc);
        if h.mu.abs() <= tol {
            return Err(Error::RankDeficient {
                column: i + 1,
                pivot: h.mu,
            });
        }
    }
    Ok(QrFactors { q, r })
}

/// `Q[:, c0..c0+len] -= (Q[:, c0..c0+len] vs) vᵀ` where `vs = τ v`.
///
/// Charged `rows · (4·len − 1)`.
pub(crate) fn reflect_cols(q: &mut DenseMatrix, c0: usize, vs: &[f64], v: &[f64], fc: &mut FlopCounter) {
    let rows = q.nrows();
    let len = v.len();
    let mut w = vec![0.0; rows];
    for (k, &vk) in vs.iter().enumerate() {
        for (wi, qi) in w.iter_mut().zip(q.col(c0 + k)) {
            *wi += qi * vk;
        }
    }
    for (k, &vk) in v.iter().enumerate() {
        for (qi, wi) in q.col_mut(c0 + k).iter_mut().zip(&w) {
            *qi -= wi * vk;
        }
    }
    fc.mul(rows * len);
    fc.add(rows * (len - 1));
    fc.mul(rows * len);
    fc.sub(rows * len);
}

/// `R[r0..r0+len, c] -= vs (vᵀ R[r0..r0+len, c])` for each `c` in `cols`.
///
/// Charged `(4·len − 1)` per column.
pub(crate) fn reflect_rows(
    r: &mut DenseMatrix,
    r0: usize,
    cols: std::ops::Range<usize>,
    vs: &[f64],
    v: &[f64],
    fc: &mut FlopCounter,
) {
    let len = v.len();
    for c in cols {
        let col = &mut r.col_mut(c)[r0..r0 + len];
        let w = crate::matrix::dot(v, col);
        for (x, s) in col.iter_mut().zip(vs) {
            *x -= s * w;
        }
        fc.dot(len);
        fc.mul(len);
        fc.sub(len);
    }
}

/// `τ v`, charged `len` products.
pub(crate) fn scaled(tau: f64, v: &[f64], fc: &mut FlopCounter) -> Vec<f64> {
    fc.mul(v.len());
    v.iter().map(|x| tau * x).collect()
}

fn check_square_system(t: &DenseMatrix, b: &[f64]) -> Result<usize> {
    let p = t.nrows();
    if t.ncols() != p || b.len() != p {
        return Err(Error::DimensionMismatch(format!(
            "triangular system {}×{} with rhs {}",
            t.nrows(),
            t.ncols(),
            b.len()
        )));
    }
    for i in 0..p {
        if t[(i, i)].abs() <= 1e-300 {
            return Err(Error::SingularTriangular(i + 1));
        }
    }
    Ok(p)
}

/// Solves `L x = b` for lower-triangular `L` in exactly `p²` operations.
pub fn forward_substitution(l: &DenseMatrix, b: &[f64]) -> Result<Vec<f64>> {
    forward_substitution_counted(l, b, &mut FlopCounter::new())
}

pub(crate) fn forward_substitution_counted(l: &DenseMatrix, b: &[f64], fc: &mut FlopCounter) -> Result<Vec<f64>> {
    let p = check_square_system(l, b)?;
    let mut x = b.to_vec();
    for i in 0..p {
        let mut acc = x[i];
        for j in 0..i {
            acc -= l[(i, j)] * x[j];
        }
        x[i] = acc / l[(i, i)];
    }
    charge_solve(p, fc);
    Ok(x)
}

/// Solves `U x = b` for upper-triangular `U` in exactly `p²` operations.
pub fn backward_substitution(u: &DenseMatrix, b: &[f64]) -> Result<Vec<f64>> {
    backward_substitution_counted(u, b, &mut FlopCounter::new())
}

pub(crate) fn backward_substitution_counted(u: &DenseMatrix, b: &[f64], fc: &mut FlopCounter) -> Result<Vec<f64>> {
    let p = check_square_system(u, b)?;
    let mut x = b.to_vec();
    for i in (0..p).rev() {
        let mut acc = x[i];
        for j in (i + 1)..p {
            acc -= u[(i, j)] * x[j];
        }
        x[i] = acc / u[(i, i)];
    }
    charge_solve(p, fc);
    Ok(x)
}

/// Solves `Uᵀ x = b` for upper-triangular `U` by forward substitution.
pub fn forward_substitution_transposed(u: &DenseMatrix, b: &[f64]) -> Result<Vec<f64>> {
    forward_substitution_transposed_counted(u, b, &mut FlopCounter::new())
}

pub(crate) fn forward_substitution_transposed_counted(
    u: &DenseMatrix,
    b: &[f64],
    fc: &mut FlopCounter,
) -> Result<Vec<f64>> {
    let p = check_square_system(u, b)?;
    let mut x = b.to_vec();
    for i in 0..p {
        let ui = u.col(i);
        let mut acc = x[i];
        for j in 0..i {
            acc -= ui[j] * x[j];
        }
        x[i] = acc / ui[i];
    }
    charge_solve(p, fc);
    Ok(x)
}

fn charge_solve(p: usize, fc: &mut FlopCounter) {
    let off = p * p.saturating_sub(1) / 2;
    fc.mul(off);
    fc.sub(off);
    fc.div(p);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn givens_examples() {
        assert_eq!(givens(1.0, 0.0), GivensRotation { c: 1.0, s: 0.0 });
        let g = givens(0.0, 2.0);
        assert_eq!((g.c, g.s), (0.0, -1.0));
        assert_eq!(g.rotate(0.0, 2.0), (2.0, 0.0));
        let g = givens(3.0, 4.0);
        assert!((g.c - 0.6).abs() < 1e-15 && (g.s + 0.8).abs() < 1e-15);
        let (r, z) = g.rotate(3.0, 4.0);
        assert!((r - 5.0).abs() < 1e-14 && z.abs() < 1e-14);
        assert_eq!(givens(0.0, 0.0), GivensRotation { c: 1.0, s: 0.0 });
    }

    #[test]
    fn householder_examples() {
        let h = householder(2.0, &[0.0, 0.0]);
        assert_eq!((h.tau, h.mu), (0.0, 2.0));
        let h = householder(-2.0, &[0.0, 0.0]);
        assert_eq!((h.tau, h.mu), (2.0, 2.0));
        let mut y = [-2.0, 0.0, 0.0];
        h.apply(&mut y);
        assert_eq!(y, [2.0, 0.0, 0.0]);

        let h = householder(3.0, &[4.0]);
        assert!((h.tau - 0.4).abs() < 1e-15);
        assert!((h.v[1] + 2.0).abs() < 1e-15);
        assert_eq!(h.mu, 5.0);
        let mut y = [3.0, 4.0];
        h.apply(&mut y);
        assert!((y[0] - 5.0).abs() < 1e-14 && y[1].abs() < 1e-14);
    }

    #[test]
    fn primitive_charges_are_nominal() {
        for (a, b) in [(0.0, 0.0), (1.0, 0.0), (1.0, 3.0), (-4.0, 1.0)] {
            let mut fc = FlopCounter::new();
            givens_counted(a, b, &mut fc);
            assert_eq!(fc.total(), 6);
        }
        for (a, x) in [(1.0, vec![0.0; 3]), (-1.0, vec![0.0; 3]), (2.0, vec![1.0, -2.0, 0.5])] {
            let mut fc = FlopCounter::new();
            householder_counted(a, &x, &mut fc);
            assert_eq!(fc.total(), 3 * 3 + 9);
        }
    }

    #[test]
    fn small_qr() {
        let f = qr_factorize(&DenseMatrix::identity(3)).unwrap();
        assert_eq!(f.q, DenseMatrix::identity(3));
        assert_eq!(f.r, DenseMatrix::identity(3));
        let f = qr_factorize(&DenseMatrix::from_row_slice(2, 1, &[3.0, 4.0])).unwrap();
        assert!((f.r[(0, 0)] - 5.0).abs() < 1e-14);
    }

    #[test]
    fn rank_deficiency_flagged() {
        let x = DenseMatrix::from_row_slice(3, 2, &[1., 2., 2., 4., 3., 6.]);
        assert!(matches!(qr_factorize(&x), Err(Error::RankDeficient { column: 2, .. })));
    }

    #[test]
    fn triangular_solves() {
        let u = DenseMatrix::from_row_slice(2, 2, &[2., 1., 0., 4.]);
        assert_eq!(backward_substitution(&u, &[5., 8.]).unwrap(), vec![1.5, 2.0]);
        let l = u.transpose();
        assert_eq!(
            forward_substitution(&l, &[4., 9.]).unwrap(),
            forward_substitution_transposed(&u, &[4., 9.]).unwrap()
        );
        assert_eq!(forward_substitution(&DenseMatrix::identity(3), &[1., -2., 3.]).unwrap(), vec![1., -2., 3.]);
        let z = DenseMatrix::from_row_slice(2, 2, &[1., 0., 1., 0.]);
        assert_eq!(forward_substitution(&z, &[1., 1.]), Err(Error::SingularTriangular(2)));
    }
}

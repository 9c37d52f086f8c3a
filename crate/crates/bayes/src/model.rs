//! Data summaries and the per-model state kept by the sampler.

use qrkit_core::{dot, forward_substitution_transposed, DenseMatrix, RFactor};

use crate::error::{Error, Result};
use crate::hyper::Hyperparams;

/// Design, response, and the cross products reused by every move.
#[derive(Clone, Debug)]
pub struct Dataset {
    pub x: DenseMatrix,
    pub y: Vec<f64>,
    pub xty: Vec<f64>,
    pub col_sq: Vec<f64>,
    pub yty: f64,
}

impl Dataset {
    /// `x` must carry the intercept in column 0.
    pub fn new(x: DenseMatrix, y: Vec<f64>) -> Result<Self> {
        if x.nrows() != y.len() {
            return Err(Error::DimensionMismatch(format!("X has {} rows but y has {}", x.nrows(), y.len())));
        }
        if x.ncols() == 0 || x.nrows() < 2 {
            return Err(Error::DimensionMismatch(format!("design is {}×{}", x.nrows(), x.ncols())));
        }
        if !x.is_finite() || y.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig("data contain non-finite values".into()));
        }
        let xty = x.t_mat_vec(&y);
        let col_sq = (0..x.ncols()).map(|j| dot(x.col(j), x.col(j))).collect();
        let yty = dot(&y, &y);
        Ok(Self { x, y, xty, col_sq, yty })
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn p(&self) -> usize {
        self.x.ncols()
    }

    /// Number of covariates subject to selection.
    pub fn candidates(&self) -> usize {
        self.p() - 1
    }

    /// Rows `idx` as a new dataset.
    pub fn subset_rows(&self, idx: &[usize]) -> Result<Self> {
        let y = idx.iter().map(|&i| self.y[i]).collect();
        Self::new(self.x.select_rows(idx), y)
    }
}

/// `[X_γ; υ₀^{-1/2} I]` for the columns `cols`, in that order.
pub fn augmented_design(x: &DenseMatrix, cols: &[usize], upsilon0: f64) -> DenseMatrix {
    let n = x.nrows();
    let k = cols.len();
    let ridge = upsilon0.powf(-0.5);
    DenseMatrix::from_fn(n + k, k, |i, j| {
        if i < n {
            x[(i, cols[j])]
        } else if i - n == j {
            ridge
        } else {
            0.0
        }
    })
}

/// `log ℓ(γ)` up to a constant, from the factor diagonal and `S²`.
pub fn log_marginal_from_parts(log_det_r: f64, p_gamma: usize, s2: f64, n: usize, hp: &Hyperparams) -> Result<f64> {
    let tail = hp.lambda + 0.5 * s2;
    if !(tail > 0.0) || !tail.is_finite() {
        return Err(Error::NumericalBreakdown(format!("λ + S²/2 = {tail:e}")));
    }
    Ok(-log_det_r - 0.5 * p_gamma as f64 * hp.upsilon0.ln() - (hp.nu + 0.5 * n as f64) * tail.ln())
}

/// A model `γ` together with the factor of its ridge-augmented design.
#[derive(Clone, Debug)]
pub struct ModelState {
    /// Included columns in factor order; `cols[0]` is the intercept.
    pub cols: Vec<usize>,
    pub included: Vec<bool>,
    pub r: RFactor,
    /// `R⁻ᵀ X_γᵀ y`.
    pub z: Vec<f64>,
    pub s2: f64,
    pub log_ml: f64,
}

impl ModelState {
    /// Factorizes the augmented design of `cols` from scratch.
    pub fn from_scratch(data: &Dataset, cols: &[usize], hp: &Hyperparams) -> Result<Self> {
        let p = data.p();
        let mut included = vec![false; p];
        if cols.first() != Some(&0) {
            return Err(Error::InvalidConfig("model must start with the intercept column".into()));
        }
        for &c in cols {
            if c >= p || included[c] {
                return Err(Error::InvalidConfig(format!("column {c} is out of range or repeated")));
            }
            included[c] = true;
        }
        let r = RFactor::from_design(&augmented_design(&data.x, cols, hp.upsilon0))?;
        Self::from_factor(data, cols.to_vec(), included, r, hp)
    }

    /// Intercept-only model.
    pub fn null(data: &Dataset, hp: &Hyperparams) -> Result<Self> {
        Self::from_scratch(data, &[0], hp)
    }

    /// Completes a state from a factor already matching `cols`.
    pub fn from_factor(data: &Dataset, cols: Vec<usize>, included: Vec<bool>, r: RFactor, hp: &Hyperparams) -> Result<Self> {
        let rhs: Vec<f64> = cols.iter().map(|&c| data.xty[c]).collect();
        let z = forward_substitution_transposed(r.matrix(), &rhs)?;
        let s2 = data.yty - dot(&z, &z);
        let log_ml = log_marginal_from_parts(r.log_abs_det(), cols.len(), s2, data.n(), hp)?;
        Ok(Self { cols, included, r, z, s2, log_ml })
    }

    pub fn p_gamma(&self) -> usize {
        self.cols.len()
    }

    /// Included non-intercept covariates.
    pub fn size(&self) -> usize {
        self.cols.len() - 1
    }

    /// Columns in increasing order.
    pub fn sorted_cols(&self) -> Vec<usize> {
        let mut c = self.cols.clone();
        c.sort_unstable();
        c
    }

    /// Posterior mean of `β_γ` in factor order: `R⁻¹ z`.
    pub fn beta_mean(&self) -> Result<Vec<f64>> {
        Ok(qrkit_core::backward_substitution(self.r.matrix(), &self.z)?)
    }

    /// Adds column `j` at the end of the factor.
    pub fn birth(&self, data: &Dataset, j: usize, hp: &Hyperparams) -> Result<Self> {
        let k = self.cols.len();
        let xj = data.x.col(j);
        let xtv = DenseMatrix::from_fn(k, 1, |i, _| dot(data.x.col(self.cols[i]), xj));
        let vtv = DenseMatrix::from_fn(1, 1, |_, _| data.col_sq[j] + 1.0 / hp.upsilon0);
        let r = qrkit_core::r_add_cols_cross(&self.r, &xtv, &vtv)?;
        let rm = r.matrix();
        let r22 = rm[(k, k)];
        let mut acc = data.xty[j];
        for i in 0..k {
            acc -= rm[(i, k)] * self.z[i];
        }
        let znew = acc / r22;
        let mut z = self.z.clone();
        z.push(znew);
        let s2 = self.s2 - znew * znew;
        let log_ml = log_marginal_from_parts(r.log_abs_det(), k + 1, s2, data.n(), hp)?;
        let mut cols = self.cols.clone();
        cols.push(j);
        let mut included = self.included.clone();
        included[j] = true;
        Ok(Self { cols, included, r, z, s2, log_ml })
    }

    /// Drops the covariate at factor position `pos ≥ 1`.
    pub fn death(&self, data: &Dataset, pos: usize, hp: &Hyperparams) -> Result<Self> {
        if pos == 0 || pos >= self.cols.len() {
            return Err(Error::InvalidConfig(format!("cannot drop factor position {pos}")));
        }
        let r = qrkit_core::r_delete_cols(&self.r, pos + 1, 1)?;
        let mut cols = self.cols.clone();
        let gone = cols.remove(pos);
        let mut included = self.included.clone();
        included[gone] = false;
        Self::from_factor(data, cols, included, r, hp)
    }

    /// Re-targets the state at another dataset sharing all but a few rows.
    ///
    /// `removed` and `added` are full-width rows of the old and new data.
    pub fn exchange_rows(&self, data: &Dataset, removed: &DenseMatrix, added: &DenseMatrix, hp: &Hyperparams) -> Result<Self> {
        let mut r = self.r.clone();
        if removed.nrows() > 0 {
            r = qrkit_core::r_delete_rows(&r, &removed.select_cols(&self.cols))?;
        }
        if added.nrows() > 0 {
            r = qrkit_core::r_add_rows(&r, &added.select_cols(&self.cols))?;
        }
        Self::from_factor(data, self.cols.clone(), self.included.clone(), r, hp)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> (Dataset, Hyperparams) {
        let x = DenseMatrix::from_fn(8, 3, |i, j| if j == 0 { 1.0 } else { ((i * 7 + j * 3) % 5) as f64 - 2.0 + 0.1 * j as f64 });
        let y: Vec<f64> = (0..8).map(|i| (i as f64 * 0.7).sin()).collect();
        let hp = Hyperparams { nu: 0.5, lambda: 0.5, upsilon0: 4.0, theta_xi: 1.0, theta_phi: 1.0 };
        (Dataset::new(x, y).unwrap(), hp)
    }

    #[test]
    fn birth_and_death_agree_with_refactorization() {
        let (d, hp) = toy();
        let s0 = ModelState::null(&d, &hp).unwrap();
        let s1 = s0.birth(&d, 2, &hp).unwrap().birth(&d, 1, &hp).unwrap();
        let direct = ModelState::from_scratch(&d, &[0, 2, 1], &hp).unwrap();
        assert!((s1.log_ml - direct.log_ml).abs() < 1e-12);
        let s2 = s1.death(&d, 1, &hp).unwrap();
        assert_eq!(s2.cols, vec![0, 1]);
        let direct = ModelState::from_scratch(&d, &[0, 1], &hp).unwrap();
        assert!((s2.log_ml - direct.log_ml).abs() < 1e-12);
        assert!(s0.death(&d, 0, &hp).is_err());
    }

    #[test]
    fn duplicated_column_stays_finite() {
        let (d, hp) = toy();
        let mut x = d.x.clone();
        x = x.insert_cols(3, &DenseMatrix::column_vector(d.x.col(1)));
        let d = Dataset::new(x, d.y.clone()).unwrap();
        let s = ModelState::from_scratch(&d, &[0, 1, 3], &hp).unwrap();
        assert!(s.log_ml.is_finite());
    }
}

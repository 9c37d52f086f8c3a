//! Dense QR factorization with fast updating and downdating.
//!
//! Two families of updates are provided. The `qr_*` functions maintain a
//! full `Q R` pair; the `r_*` functions maintain only the square
//! triangular factor `R₁` with `R₁ᵀR₁ = XᵀX`, which is all a least-squares
//! or Gaussian-likelihood computation needs. Every operation has an
//! instrumented twin under [`flops::counted`] whose operation count is
//! predicted exactly by [`flops::predict_cost`].
//!
//! Row and column positions in the public API are 1-based.

mod error;
pub mod flops;
mod linalg;
mod matrix;
mod qr_update;
mod r_update;

pub use error::{Error, Result};
pub use flops::{CostQuery, FlopCounter, Operation};
pub use linalg::{
    backward_substitution, forward_substitution, forward_substitution_transposed, givens, householder, qr_factorize,
    GivensRotation, HouseholderReflector, QrFactors, RFactor,
};
pub use matrix::{dot, factor_diff, normalize_row_signs, rel_diff, DenseMatrix};
pub use qr_update::{
    qr_add_cols, qr_add_rows, qr_delete_cols, qr_delete_cols_nonadjacent, qr_delete_rows, qrstep, RowPermutationPlan,
};
pub use r_update::{
    gram_inverse_add_col, gram_inverse_delete_col, r_add_cols, r_add_cols_cross, r_add_rows, r_delete_cols,
    r_delete_cols_nonadjacent, r_delete_rows, thinqrstep,
};

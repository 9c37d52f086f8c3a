//! Bayesian variable selection for Gaussian linear regression under a
//! Dirac spike-and-slab prior, driven by Q-free updates of the triangular
//! factor of the ridge-augmented design.

mod chol;
pub mod cv;
pub mod data;
pub mod enumerate;
mod error;
pub mod hyper;
pub mod metrics;
pub mod model;
pub mod prior;
pub mod sampler;
pub mod simulate;

pub use error::{Error, Result};
pub use hyper::{default_hyperparams, Hyperparams};
pub use model::{Dataset, ModelState};
pub use prior::{log_prior_gamma, PriorConfig, ThetaPrior};
pub use sampler::{run_chain, ChainConfig, ChainSummary, Sampler};

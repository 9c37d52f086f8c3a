//! Operation counting: a per-call tally, closed-form predictions and the
//! instrumented entry points that tie the two together.

pub mod counted;
mod counter;
mod grid;
mod model;

pub use counter::FlopCounter;
pub use grid::{cost_grid, figure_grid, measure_cost, CostRow, MEASURE_LIMIT};
pub use model::{dominant_term, predict_cost, printed_cost, CostQuery, Operation};

//! Stability-maximizing greedy sensor placement and its comparison against
//! random placement.

mod compare;
mod factor;
mod io;
mod sgreedy;

pub use compare::{compare_strategies, Comparison, ComparisonRow, Strategy};
pub use sgreedy::{candidate_grid, sgreedy, PlacementState, StepRecord};
pub use io::write_betas;

//! PBDW state estimation: saddle-point and two-step solves, stability
//! constant, a-priori bound, GCV choice of the regularization weight and
//! error metrics.

mod bound;
mod gcv;
pub mod io;
mod metrics;
mod solve;
mod stability;

pub use bound::{error_bound_check, BoundCheck};
pub use io::{write_results, ResultRow, RESULTS_HEADER};
pub use gcv::{gcv_score, gcv_select, GcvSelection};
pub use metrics::{metrics, Metrics};
pub use solve::{
    background_stage, orthogonality_residual, reconstruct, solve_saddle, solve_two_step, BackgroundStage,
    Coefficients, Diagnostics, PbdwSolution,
};
pub use stability::{inf_sup, StabilityReport};
pub(crate) use stability::from_whitened;

use crate::scalar::Real;

/// Relative rank tolerance applied to the singular values of `B`.
pub const RANK_TOL: f64 = 1e-12;

/// `xi * M`, the scaling of the regularization weight used in the algebra.
pub(crate) fn scaled_weight<T: Real>(xi: T, m: usize) -> T {
    xi * T::from_usize_lossy(m)
}

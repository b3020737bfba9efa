//! Experiment drivers. Cells run on the rayon pool; rows are collected in
//! cell order and sorted by key before a single writer emits them.

pub mod bias;
pub mod cost;
pub mod modes;
pub mod noise;
pub mod sensors;

use pbdw::assimilation::gcv_select;
use pbdw::linalg::dense::{CMatrix, CVector};

use crate::config::XiMode;
use crate::error::Result;

/// Noise realization of a cell, derived from the run seed and the cell seed.
pub fn noise_seed(run: u64, cell: u64) -> u64 {
    run.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ cell
}

/// Regularization weight of one solve.
pub fn regularization(mode: XiMode, a: &CMatrix<f64>, b: &CMatrix<f64>, y: &CVector<f64>, grid: &[f64]) -> Result<f64> {
    Ok(match mode {
        XiMode::Zero => 0.0,
        XiMode::Fixed(x) => x,
        XiMode::Gcv => gcv_select(a, b, y, grid)?.xi,
    })
}

/// `||u - v||_{L2} / ||u||_{L2}`.
pub fn relative_l2(space: &pbdw::field::FemSpace<f64>, u: &pbdw::Field64, v: &pbdw::Field64) -> f64 {
    (space.l2_norm_sqr(&u.sub(v)) / space.l2_norm_sqr(u).max(f64::MIN_POSITIVE)).sqrt()
}

use crate::field::{DiscreteField, FemSpace};
use crate::reduced_basis::BackgroundBasis;
use crate::scalar::Real;

use super::solve::PbdwSolution;

/// Error measures of one reconstruction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Metrics<T> {
    /// `||u_true - u_NM||_{L2}^2`
    pub e_exact: T,
    /// `||u_true - z_NM||_{L2}^2`
    pub e_estim: T,
    /// `||eta_NM||_{L2}`
    pub eta_norm: T,
    /// Best-fit distance of the truth to the background, in the basis norm.
    pub e_svd: T,
    /// `||u_true - u_NM||_{L2} / ||u_true||_{L2}`
    pub rel_exact: T,
    /// `||u_true - z_NM||_{L2} / ||u_true||_{L2}`
    pub rel_estim: T,
}

pub fn metrics<T: Real>(
    space: &FemSpace<T>,
    solution: &PbdwSolution<T>,
    u_true: &DiscreteField<T>,
    basis: &BackgroundBasis<T>,
) -> Metrics<T> {
    let e_exact = space.l2_norm_sqr(&u_true.sub(&solution.reconstructed));
    let e_estim = space.l2_norm_sqr(&u_true.sub(&solution.background));
    let truth = space.l2_norm_sqr(u_true).sqrt().max(T::tiny());
    Metrics {
        e_exact,
        e_estim,
        eta_norm: space.l2_norm_sqr(&solution.update).sqrt(),
        e_svd: basis.projection_error(u_true),
        rel_exact: e_exact.sqrt() / truth,
        rel_estim: e_estim.sqrt() / truth,
    }
}

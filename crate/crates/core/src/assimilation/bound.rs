use crate::error::{Error, Result};
use crate::field::DiscreteField;
use crate::linalg::dense::{self, CMatrix, CVector};
use crate::observation::SensorSet;
use crate::reduced_basis::BackgroundBasis;
use crate::scalar::Real;

use super::solve::PbdwSolution;

/// Both sides of the a-priori estimate
/// `||u - u_NM|| <= (1 + 1/beta) inf_{q in U_M, q perp Z_N} ||P_{Z_N^perp} u - q||`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundCheck<T> {
    pub lhs: T,
    pub rhs: T,
    /// The infimum (best-fit term) before the stability factor.
    pub best_fit: T,
    pub satisfied: bool,
}

/// Evaluates the a-priori bound for an unregularized, noise-free solve.
pub fn error_bound_check<T: Real>(
    solution: &PbdwSolution<T>,
    noise_level: T,
    u_true: &DiscreteField<T>,
    beta: T,
    basis: &BackgroundBasis<T>,
    set: &SensorSet<T>,
) -> Result<BoundCheck<T>> {
    if solution.coefficients.xi > T::zero() {
        return Err(Error::BoundNotApplicable("regularized solve (xi > 0)".into()));
    }
    if noise_level > T::zero() {
        return Err(Error::BoundNotApplicable("noisy observations (delta > 0)".into()));
    }
    if !(beta > T::zero()) {
        return Err(Error::BoundNotApplicable("inf-sup constant is zero".into()));
    }
    let ip = basis.inner_product();
    let b = basis
        .coupling()
        .ok_or_else(|| Error::Dimension("basis has no sensors bound".into()))?;
    let lhs = ip.norm(&u_true.sub(&solution.reconstructed));
    let best_fit = constrained_best_fit(u_true, basis, set, b)?;
    let rhs = (T::one() + T::one() / beta) * best_fit;
    // rounding allowance relative to the state size
    let slack = T::lit(1e-10) * ip.norm(u_true);
    Ok(BoundCheck {
        lhs,
        rhs,
        best_fit,
        satisfied: lhs <= rhs + slack,
    })
}

/// `min ||w - sum a_m q_m||` over `a` with `B^H a = 0`, where `w` is the
/// part of `u` orthogonal to the background.
fn constrained_best_fit<T: Real>(
    u: &DiscreteField<T>,
    basis: &BackgroundBasis<T>,
    set: &SensorSet<T>,
    b: &CMatrix<T>,
) -> Result<T> {
    let ip = basis.inner_product();
    let w = u.sub(&basis.project(u));
    let m = set.len();
    // projector onto ker(B^H)
    let p = if b.ncols() == 0 {
        CMatrix::<T>::identity(m, m)
    } else {
        let q = b.clone().qr().q();
        CMatrix::<T>::identity(m, m) - &q * q.adjoint()
    };
    let g: CVector<T> = set.apply(&w);
    // (P A P + I - P) a = P g has its solution inside ker(B^H)
    let lhs = &p * set.gram() * &p + CMatrix::<T>::identity(m, m) - &p;
    let alpha = dense::lu(&lhs).solve(&(&p * g)).ok_or(Error::SingularSystem)?;
    let alpha = &p * alpha;
    let fit = set.expand(alpha.as_slice());
    Ok(ip.norm(&w.sub(&fit)))
}

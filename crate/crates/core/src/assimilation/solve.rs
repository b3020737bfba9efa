use nalgebra::Cholesky;

use crate::error::{Error, Result};
use crate::field::DiscreteField;
use crate::linalg::dense::{self, CMatrix, CVector};
use crate::observation::SensorSet;
use crate::reduced_basis::BackgroundBasis;
use crate::scalar::{Cplx, Real};

use super::{scaled_weight, RANK_TOL};

/// Background and update coefficients of one PBDW solve.
#[derive(Clone, Debug, PartialEq)]
pub struct Coefficients<T: Real> {
    pub z: CVector<T>,
    pub eta: CVector<T>,
    pub xi: T,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Diagnostics<T> {
    /// `||B^H eta|| / max(||eta||, tiny)`
    pub orthogonality_residual: T,
    /// `||A eta + B z - y|| / ||y||`
    pub observation_residual: T,
}

/// Reconstructed state together with its two components.
#[derive(Clone, Debug)]
pub struct PbdwSolution<T: Real> {
    pub coefficients: Coefficients<T>,
    pub background: DiscreteField<T>,
    pub update: DiscreteField<T>,
    pub reconstructed: DiscreteField<T>,
    pub diagnostics: Diagnostics<T>,
}

pub(crate) fn check_shapes_public<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>, y: &CVector<T>, xi: T) -> Result<()> {
    let m = a.nrows();
    if a.ncols() != m || b.nrows() != m || y.len() != m {
        return Err(Error::Dimension(format!(
            "A is {}x{}, B is {}x{}, y has {} entries",
            a.nrows(),
            a.ncols(),
            b.nrows(),
            b.ncols(),
            y.len()
        )));
    }
    if m == 0 {
        return Err(Error::InvalidParameter("no observations".into()));
    }
    if !(xi >= T::zero()) || !xi.is_finite() {
        return Err(Error::InvalidParameter(format!("regularization weight must be >= 0, got {xi}")));
    }
    let deficient = dense::rank_deficiency(b, T::lit(RANK_TOL));
    if deficient > 0 {
        return Err(Error::Unobservable {
            deficient,
            columns: b.ncols(),
        });
    }
    Ok(())
}

/// `||B^H eta|| / max(||eta||, tiny)`
pub fn orthogonality_residual<T: Real>(b: &CMatrix<T>, eta: &CVector<T>) -> T {
    if b.ncols() == 0 {
        return T::zero();
    }
    let tiny = T::tiny();
    dense::norm(&(b.adjoint() * eta)) / dense::norm(eta).max(tiny)
}

/// Removes the component of `eta` in the range of `B`. The exact solution
/// satisfies `B^H eta = 0`; this cleans up the rounding left by the solve.
fn enforce_orthogonality<T: Real>(b: &CMatrix<T>, eta: CVector<T>) -> CVector<T> {
    if b.ncols() == 0 {
        return eta;
    }
    if b.ncols() >= b.nrows() {
        // full-rank square B: the kernel of B^H is trivial
        return CVector::zeros(eta.len());
    }
    let q = b.clone().qr().q();
    let mut out = eta;
    for _ in 0..2 {
        let c = q.adjoint() * &out;
        out -= &q * c;
    }
    out
}

/// Monolithic solve of `[xi M I + A, B; B^H, 0] [eta; z] = [y; 0]` with one
/// dense LU of order `M + N`.
pub fn solve_saddle<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>, y: &CVector<T>, xi: T) -> Result<Coefficients<T>> {
    check_shapes_public(a, b, y, xi)?;
    let (m, n) = b.shape();
    let shift = scaled_weight(xi, m);
    let mut k = CMatrix::<T>::zeros(m + n, m + n);
    k.view_mut((0, 0), (m, m)).copy_from(a);
    for i in 0..m {
        k[(i, i)] += Cplx::new(shift, T::zero());
    }
    k.view_mut((0, m), (m, n)).copy_from(b);
    k.view_mut((m, 0), (n, m)).copy_from(&b.adjoint());
    let mut rhs = CVector::<T>::zeros(m + n);
    rhs.rows_mut(0, m).copy_from(y);
    let lu = dense::lu(&k);
    let mut x = lu.solve(&rhs).ok_or(Error::SingularSystem)?;
    // one step of iterative refinement with the same factors
    let r = &rhs - &k * &x;
    if let Some(dx) = lu.solve(&r) {
        x += dx;
    }
    if x.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::SingularSystem);
    }
    let eta = enforce_orthogonality(b, x.rows(0, m).into_owned());
    Ok(Coefficients {
        z: x.rows(m, n).into_owned(),
        eta,
        xi,
    })
}

/// Background stage shared by the two-step solve and the hybrid
/// reconstruction: `z = argmin ||y - B z||_{W}` with `W = (xi M I + A)^{-1}`.
pub struct BackgroundStage<T: Real> {
    pub z: CVector<T>,
    /// Cholesky factor of `xi M I + A`.
    pub weight: Cholesky<Cplx<T>, nalgebra::Dyn>,
}

pub fn background_stage<T: Real>(
    a: &CMatrix<T>,
    b: &CMatrix<T>,
    y: &CVector<T>,
    xi: T,
) -> Result<BackgroundStage<T>> {
    check_shapes_public(a, b, y, xi)?;
    let (m, n) = b.shape();
    let mut c = a.clone();
    let shift = scaled_weight(xi, m);
    for i in 0..m {
        c[(i, i)] += Cplx::new(shift, T::zero());
    }
    let weight = dense::cholesky(&c, "regularized Gram xi M I + A")?;
    if n == 0 {
        return Ok(BackgroundStage {
            z: CVector::zeros(0),
            weight,
        });
    }
    let wb = weight.solve(b);
    let wy = weight.solve(y);
    let mut s = b.adjoint() * &wb;
    s = (&s + s.adjoint()).map(|v| v * T::lit(0.5));
    let rhs = b.adjoint() * wy;
    let schur = dense::cholesky(&s, "reduced normal matrix B^H W B")?;
    Ok(BackgroundStage {
        z: schur.solve(&rhs),
        weight,
    })
}

/// Two-step solve: weighted least squares for `z`, then `eta = W (y - B z)`.
pub fn solve_two_step<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>, y: &CVector<T>, xi: T) -> Result<Coefficients<T>> {
    let stage = background_stage(a, b, y, xi)?;
    let eta = stage.weight.solve(&(y - b * &stage.z));
    Ok(Coefficients {
        eta: enforce_orthogonality(b, eta),
        z: stage.z,
        xi,
    })
}

/// Assembles the fields of a solve and its diagnostics.
pub fn reconstruct<T: Real>(
    coefficients: Coefficients<T>,
    basis: &BackgroundBasis<T>,
    set: &SensorSet<T>,
    y: &CVector<T>,
) -> Result<PbdwSolution<T>> {
    let b = basis
        .coupling()
        .ok_or_else(|| Error::Dimension("basis has no sensors bound".into()))?;
    if basis.bound_sensor_hash() != Some(set.hash().as_str()) {
        return Err(Error::Dimension("basis was bound to a different sensor set".into()));
    }
    if coefficients.eta.len() != set.len() || coefficients.z.len() != basis.len() {
        return Err(Error::Dimension("coefficient lengths do not match the spaces".into()));
    }
    let background = basis.expand(coefficients.z.as_slice())?;
    let update = set.expand(coefficients.eta.as_slice());
    let reconstructed = background.add(&update);
    let predicted = set.gram() * &coefficients.eta + b * &coefficients.z;
    let tiny = T::tiny();
    let diagnostics = Diagnostics {
        orthogonality_residual: orthogonality_residual(b, &coefficients.eta),
        observation_residual: dense::norm(&(predicted - y)) / dense::norm(y).max(tiny),
    };
    Ok(PbdwSolution {
        coefficients,
        background,
        update,
        reconstructed,
        diagnostics,
    })
}

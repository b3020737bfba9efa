//! Dense helpers over complex matrices with factorization bookkeeping.

use nalgebra::{Cholesky, ComplexField, DMatrix, DVector, Dyn, LU};

use super::cost::{record, FactorKind};
use crate::error::{Error, Result};
use crate::scalar::{Cplx, Real};

pub type CMatrix<T> = DMatrix<Cplx<T>>;
pub type CVector<T> = DVector<Cplx<T>>;

/// Cholesky factorization of a Hermitian matrix, rejecting matrices whose
/// smallest pivot is lost in rounding relative to the diagonal.
pub fn cholesky<T: Real>(a: &CMatrix<T>, what: &str) -> Result<Cholesky<Cplx<T>, Dyn>> {
    let n = a.nrows();
    record(FactorKind::Cholesky, n);
    let max_diag = (0..n).fold(T::zero(), |m, i| m.max(a[(i, i)].re.abs()));
    let chol = Cholesky::new(a.clone())
        .ok_or_else(|| Error::NotPositiveDefinite(format!("{what}: Cholesky breakdown")))?;
    let l = chol.l_dirty();
    let floor = max_diag * T::machine_eps() * T::from_usize_lossy(10 * n.max(1));
    for i in 0..n {
        let d = l[(i, i)].re;
        if d * d <= floor {
            return Err(Error::NotPositiveDefinite(format!(
                "{what}: pivot {i} is {:e} relative to diagonal scale {:e}",
                (d * d).as_f64(),
                max_diag.as_f64()
            )));
        }
    }
    Ok(chol)
}

/// LU factorization with partial pivoting.
pub fn lu<T: Real>(a: &CMatrix<T>) -> LU<Cplx<T>, Dyn, Dyn> {
    record(FactorKind::Lu, a.nrows());
    a.clone().lu()
}

/// Number of singular values below `rel_tol * sigma_max`.
pub fn rank_deficiency<T: Real>(b: &CMatrix<T>, rel_tol: T) -> usize {
    if b.ncols() == 0 {
        return 0;
    }
    let sv = b.clone().singular_values();
    let smax = sv.iter().fold(T::zero(), |m, s| m.max(*s));
    let kept = sv.iter().filter(|s| **s > rel_tol * smax && smax > T::zero()).count();
    b.ncols() - kept
}

/// Largest entry modulus.
pub fn max_abs<T: Real>(a: &CMatrix<T>) -> T {
    a.iter().fold(T::zero(), |m, z| m.max(z.modulus()))
}

/// Euclidean norm of a complex vector.
pub fn norm<T: Real>(v: &CVector<T>) -> T {
    crate::scalar::vec_norm(v.as_slice())
}

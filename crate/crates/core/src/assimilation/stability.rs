use nalgebra::SymmetricEigen;

use crate::error::{Error, Result};
use crate::linalg::dense::{self, CMatrix, CVector};
use crate::scalar::Real;

/// Inf-sup constant between the background and update spaces.
#[derive(Clone, Debug, PartialEq)]
pub struct StabilityReport<T: Real> {
    pub beta: T,
    pub n: usize,
    pub m: usize,
    /// Coefficients in the background basis of the least stable unit mode.
    pub least_stable_mode: CVector<T>,
    /// Set when `N > M`, where the constant necessarily vanishes.
    pub unstable: bool,
}

/// `beta^2 = lambda_min(B^H A^{-1} B)`, the smallest cosine between the
/// background space (orthonormal modes) and the update space.
///
/// With `A = L L^H`, `beta` is the smallest singular value of `L^{-1} B`.
pub fn inf_sup<T: Real>(b: &CMatrix<T>, a: &CMatrix<T>) -> Result<StabilityReport<T>> {
    let (m, n) = b.shape();
    if a.nrows() != m || a.ncols() != m {
        return Err(Error::Dimension(format!("A is {}x{}, B has {m} rows", a.nrows(), a.ncols())));
    }
    if n == 0 {
        return Ok(StabilityReport {
            beta: T::one(),
            n,
            m,
            least_stable_mode: CVector::zeros(0),
            unstable: false,
        });
    }
    let chol = dense::cholesky(a, "sensor Gram matrix A")?;
    let l = chol.l();
    let mut x = b.clone();
    if !l.solve_lower_triangular_mut(&mut x) {
        return Err(Error::NotPositiveDefinite("sensor Gram matrix A".into()));
    }
    Ok(from_whitened(&x))
}

/// Stability report from `X = L^{-1} B`, where `A = L L^H`.
pub(crate) fn from_whitened<T: Real>(x: &CMatrix<T>) -> StabilityReport<T> {
    let (m, n) = x.shape();
    if n == 0 {
        return StabilityReport {
            beta: T::one(),
            n,
            m,
            least_stable_mode: CVector::zeros(0),
            unstable: false,
        };
    }
    if n > m {
        // the kernel of X is nontrivial; pick its lowest eigenvector
        let h = x.adjoint() * x;
        let h = (&h + h.adjoint()).map(|v| v * T::lit(0.5));
        let eig = SymmetricEigen::new(h);
        let k = argmin(eig.eigenvalues.iter().copied());
        return StabilityReport {
            beta: T::zero(),
            n,
            m,
            least_stable_mode: eig.eigenvectors.column(k).into_owned(),
            unstable: true,
        };
    }
    let svd = x.clone().svd(false, true);
    let k = argmin(svd.singular_values.iter().copied());
    let v_t = svd.v_t.expect("right singular vectors requested");
    StabilityReport {
        beta: svd.singular_values[k],
        n,
        m,
        least_stable_mode: v_t.row(k).adjoint(),
        unstable: false,
    }
}

fn argmin<T: Real>(it: impl Iterator<Item = T>) -> usize {
    let mut best = 0;
    let mut val: Option<T> = None;
    for (i, v) in it.enumerate() {
        if val.is_none_or(|b| v < b) {
            val = Some(v);
            best = i;
        }
    }
    best
}

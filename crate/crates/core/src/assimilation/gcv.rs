use crate::error::{Error, Result};
use crate::linalg::dense::{self, CMatrix, CVector};
use crate::scalar::Real;

use super::solve::{background_stage, check_shapes_public};
use super::scaled_weight;

#[derive(Clone, Debug, PartialEq)]
pub struct GcvSelection<T> {
    pub xi: T,
    /// `(xi, G(xi))` for every grid value, in grid order.
    pub scores: Vec<(T, T)>,
}

/// `G(xi) = ||(I - H) y||^2 / tr(I - H)^2`, where `H` maps the data to the
/// predicted observations `A eta + B z`.
///
/// From the solve, `(I - H) y = xi M eta` and
/// `I - H = xi M (W - W B S^{-1} B^H W)` with `S = B^H W B`.
pub fn gcv_score<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>, y: &CVector<T>, xi: T) -> Result<T> {
    check_shapes_public(a, b, y, xi)?;
    let m = a.nrows();
    let stage = background_stage(a, b, y, xi)?;
    let w = stage.weight.inverse();
    let mut r = w.clone();
    if b.ncols() > 0 {
        let wb = &w * b;
        let s = b.adjoint() * &wb;
        let s = (&s + s.adjoint()).map(|v| v * T::lit(0.5));
        let schur = dense::cholesky(&s, "reduced normal matrix B^H W B")?;
        r -= &wb * schur.solve(&wb.adjoint());
    }
    let shift = scaled_weight(xi, m);
    let eta = stage.weight.solve(&(y - b * &stage.z));
    let resid = dense::norm(&eta) * shift;
    let trace = r.trace().re * shift;
    Ok(resid * resid / (trace * trace))
}

/// Grid search of the GCV score; ties go to the larger weight.
pub fn gcv_select<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>, y: &CVector<T>, grid: &[T]) -> Result<GcvSelection<T>> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter("empty GCV grid".into()));
    }
    if let Some(bad) = grid.iter().find(|x| !(**x > T::zero())) {
        return Err(Error::InvalidParameter(format!("GCV grid values must be positive, got {bad}")));
    }
    let mut scores = Vec::with_capacity(grid.len());
    let mut best: Option<(T, T)> = None;
    for &xi in grid {
        let g = gcv_score(a, b, y, xi)?;
        scores.push((xi, g));
        if !g.is_finite() {
            continue;
        }
        let tol = T::lit(1e-12);
        best = match best {
            None => Some((xi, g)),
            Some((bx, bg)) => {
                let tie = (g - bg).abs() <= tol * bg.abs().max(g.abs());
                if (g < bg && !tie) || (tie && xi > bx) {
                    Some((xi, g))
                } else {
                    Some((bx, bg))
                }
            }
        };
    }
    let (xi, _) = best.ok_or(Error::GcvUndefined)?;
    Ok(GcvSelection { xi, scores })
}

use crate::error::{Error, Result};
use crate::linalg::dense::{self, CMatrix, CVector};
use crate::scalar::{Cplx, Real};

/// Lower Cholesky factor of a Gram matrix that grows by one row and column
/// at a time.
#[derive(Clone, Debug)]
pub(crate) struct GrowingCholesky<T: Real> {
    l: CMatrix<T>,
}

impl<T: Real> GrowingCholesky<T> {
    pub fn new() -> Self {
        Self { l: CMatrix::zeros(0, 0) }
    }

    /// Refactors from scratch.
    pub fn refresh(&mut self, a: &CMatrix<T>) -> Result<()> {
        self.l = dense::cholesky(a, "sensor Gram matrix A")?.l();
        Ok(())
    }

    /// Extends the factor with the last row/column of `a` (order `m + 1`).
    pub fn append(&mut self, a: &CMatrix<T>) -> Result<()> {
        let m = self.l.nrows();
        if a.nrows() != m + 1 {
            return Err(Error::Dimension("Gram matrix must grow by one".into()));
        }
        let mut row: CVector<T> = a.view((0, m), (m, 1)).column(0).into_owned();
        if m > 0 && !self.l.solve_lower_triangular_mut(&mut row) {
            return Err(Error::NotPositiveDefinite("growing Cholesky factor".into()));
        }
        let d2 = a[(m, m)].re - row.iter().fold(T::zero(), |s, z| s + z.norm_sqr());
        if !(d2 > a[(m, m)].re * T::machine_eps() * T::lit(10.0)) {
            return Err(Error::NotPositiveDefinite(format!(
                "new sensor is numerically dependent on the previous ones (pivot {d2:e})"
            )));
        }
        let mut l = self.l.clone().resize(m + 1, m + 1, Cplx::new(T::zero(), T::zero()));
        for j in 0..m {
            l[(m, j)] = row[j].conj();
        }
        l[(m, m)] = Cplx::new(d2.sqrt(), T::zero());
        self.l = l;
        Ok(())
    }

    /// `L^{-1} rhs`
    pub fn whiten(&self, rhs: &CMatrix<T>) -> CMatrix<T> {
        let mut x = rhs.clone();
        self.l.solve_lower_triangular_mut(&mut x);
        x
    }

    /// `A^{-1} rhs`
    pub fn solve(&self, rhs: &CMatrix<T>) -> CMatrix<T> {
        let mut x = self.whiten(rhs);
        self.l.adjoint().solve_upper_triangular_mut(&mut x);
        x
    }

    #[cfg(test)]
    pub fn factor(&self) -> &CMatrix<T> {
        &self.l
    }
}

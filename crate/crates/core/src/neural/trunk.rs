use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::dense::{self, CMatrix};
use crate::scalar::{Cplx, Real};

/// Fixed trunk of the strong variant: `M` representer-coefficient vectors
/// whose fields are orthogonal to the background space.
#[derive(Clone, Debug, PartialEq)]
pub struct TrunkBasis<T: Real> {
    phi: CMatrix<T>,
}

/// Relative size below which a projected sensor direction counts as lost.
const DEGENERATE_TOL: f64 = 1e-12;

impl<T: Real> TrunkBasis<T> {
    /// Starts from the representer directions `q_m` and removes from each the
    /// component along the background. The projection acts inside the
    /// update space: for fields `sum c_k q_k` the inner product is
    /// `d^H A c`, and `zeta_n` restricted to that space is `sum alpha_k q_k`
    /// with `A alpha = B e_n`.
    pub fn build(a: &CMatrix<T>, b: &CMatrix<T>) -> Result<Self> {
        let (m, n) = b.shape();
        if m == 0 || a.shape() != (m, m) {
            return Err(Error::Dimension(format!("A is {:?}, B is {m}x{n}", a.shape())));
        }
        let chol = dense::cholesky(a, "sensor Gram matrix A")?;
        let alpha = chol.solve(b);
        // A-orthonormal basis of the restricted background
        let mut q: Vec<nalgebra::DVector<Cplx<T>>> = Vec::with_capacity(n);
        let tol = T::lit(1e-10);
        for j in 0..n {
            let mut v = alpha.column(j).into_owned();
            let scale = a_norm(a, &v);
            for _ in 0..2 {
                for u in &q {
                    let c = (u.adjoint() * a * &v)[(0, 0)];
                    v -= u * c;
                }
            }
            let nv = a_norm(a, &v);
            if nv > tol * scale {
                q.push(v.unscale(nv));
            }
        }
        let mut phi = CMatrix::identity(m, m);
        for _ in 0..2 {
            for u in &q {
                let c = u.adjoint() * a * &phi;
                phi -= u * c;
            }
        }
        for k in 0..m {
            let col = phi.column(k).into_owned();
            let unit = a[(k, k)].re.sqrt();
            if a_norm(a, &col) <= T::lit(DEGENERATE_TOL) * unit {
                return Err(Error::DegenerateTrunk { index: k });
            }
        }
        Ok(Self { phi })
    }

    pub fn from_matrix(phi: CMatrix<T>) -> Self {
        Self { phi }
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.phi
    }

    pub fn len(&self) -> usize {
        self.phi.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.phi.ncols() == 0
    }

    /// `max |<phi_m, zeta_n>| = max |(B^H Phi)_{nm}|`
    pub fn residual(&self, b: &CMatrix<T>) -> T {
        dense::max_abs(&(b.adjoint() * &self.phi))
    }

    /// Real `2M x 2M` matrix acting on realified coefficients.
    pub fn realified(&self) -> DMatrix<T> {
        let m = self.phi.nrows();
        let k = self.phi.ncols();
        DMatrix::from_fn(2 * m, 2 * k, |i, j| {
            let z = self.phi[(i % m, j % k)];
            match (i < m, j < k) {
                (true, true) | (false, false) => z.re,
                (true, false) => -z.im,
                (false, true) => z.im,
            }
        })
    }
}

fn a_norm<T: Real>(a: &CMatrix<T>, v: &nalgebra::DVector<Cplx<T>>) -> T {
    (v.adjoint() * a * v)[(0, 0)].re.max(T::zero()).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::neural::realify::{derealify, realify};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn instance(m: usize, n: usize, seed: u64) -> (CMatrix<f64>, CMatrix<f64>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut c = || Cplx::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let x = CMatrix::from_fn(m, m, |_, _| c());
        let a = x.adjoint() * &x + CMatrix::identity(m, m);
        let b = CMatrix::from_fn(m, n, |_, _| c());
        (a, b)
    }

    #[test]
    fn empty_background_keeps_identity() {
        let (a, b) = instance(5, 0, 1);
        let t = TrunkBasis::build(&a, &b).unwrap();
        assert_eq!(t.matrix(), &CMatrix::identity(5, 5));
    }

    #[test]
    fn columns_are_orthogonal_and_projection_is_idempotent() {
        let (a, b) = instance(12, 4, 2);
        let t = TrunkBasis::build(&a, &b).unwrap();
        assert!(t.residual(&b) <= 1e-10);
        let again = TrunkBasis::build(&a, &b).unwrap();
        // projecting the projected columns once more leaves them unchanged
        let chol = dense::cholesky(&a, "A").unwrap();
        let alpha = chol.solve(&b);
        let s = alpha.adjoint() * &a * &alpha;
        let p = &alpha * s.try_inverse().unwrap() * alpha.adjoint() * &a;
        let twice = t.matrix() - p * t.matrix();
        assert!(dense::max_abs(&(twice - again.matrix())) <= 1e-12);
    }

    #[test]
    fn realified_matrix_matches_complex_product() {
        let (a, b) = instance(6, 2, 3);
        let t = TrunkBasis::build(&a, &b).unwrap();
        let c: Vec<Cplx<f64>> = (0..6).map(|k| Cplx::new(k as f64, 1.0 - k as f64)).collect();
        let direct = t.matrix() * nalgebra::DVector::from_vec(c.clone());
        let real = t.realified() * nalgebra::DVector::from_vec(realify(&c));
        let back = derealify(real.as_slice());
        for k in 0..6 {
            assert!((back[k] - direct[k]).norm() < 1e-13);
        }
    }

    #[test]
    fn full_background_leaves_no_direction() {
        let (a, b) = instance(3, 3, 4);
        assert!(matches!(TrunkBasis::build(&a, &b), Err(Error::DegenerateTrunk { .. })));
    }
}

use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{BandedCholesky, CsrMatrix};
use crate::scalar::{Cplx, Real};

use super::discrete::DiscreteField;
use super::mesh::{Mesh, MeshId};
use super::quadrature::DEGREE5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum InnerProductKind {
    H1,
    L2,
}

impl InnerProductKind {
    pub fn tag(self) -> &'static str {
        match self {
            InnerProductKind::H1 => "H1",
            InnerProductKind::L2 => "L2",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "H1" | "h1" => Ok(Self::H1),
            "L2" | "l2" => Ok(Self::L2),
            other => Err(Error::Parse(format!("unknown inner product `{other}`"))),
        }
    }
}

/// A mesh together with its P1 stiffness and mass matrices.
#[derive(Clone, Debug)]
pub struct FemSpace<T: Real> {
    mesh: Mesh<T>,
    stiffness: CsrMatrix<T>,
    mass: CsrMatrix<T>,
}

impl<T: Real> FemSpace<T> {
    pub fn new(mesh: Mesh<T>) -> Self {
        let n = mesh.node_count();
        let mut kt = Vec::with_capacity(9 * mesh.elements().len());
        let mut mt = Vec::with_capacity(9 * mesh.elements().len());
        let twelfth = T::lit(12.0);
        for (e, el) in mesh.elements().iter().enumerate() {
            let area = mesh.element_area(e);
            let p = el.map(|k| mesh.nodes()[k]);
            // gradients of the barycentric coordinates, scaled by 2*area
            let mut g = [[T::zero(); 2]; 3];
            for k in 0..3 {
                let (b, c) = (p[(k + 1) % 3], p[(k + 2) % 3]);
                g[k] = [b[1] - c[1], c[0] - b[0]];
            }
            let four_area = area * T::lit(4.0);
            for a in 0..3 {
                for b in 0..3 {
                    let kab = (g[a][0] * g[b][0] + g[a][1] * g[b][1]) / four_area;
                    let mab = if a == b { area / T::lit(6.0) } else { area / twelfth };
                    kt.push((el[a], el[b], kab));
                    mt.push((el[a], el[b], mab));
                }
            }
        }
        Self {
            stiffness: CsrMatrix::from_triplets(n, n, kt),
            mass: CsrMatrix::from_triplets(n, n, mt),
            mesh,
        }
    }

    pub fn mesh(&self) -> &Mesh<T> {
        &self.mesh
    }

    pub fn stiffness(&self) -> &CsrMatrix<T> {
        &self.stiffness
    }

    pub fn mass(&self) -> &CsrMatrix<T> {
        &self.mass
    }

    pub fn inner_product(&self, kind: InnerProductKind) -> InnerProduct<T> {
        let gram = match kind {
            InnerProductKind::L2 => self.mass.clone(),
            InnerProductKind::H1 => {
                let n = self.mesh.node_count();
                let mut t = Vec::with_capacity(self.stiffness.nnz() + self.mass.nnz());
                for i in 0..n {
                    t.extend(self.stiffness.row(i).map(|(j, v)| (i, j, v)));
                    t.extend(self.mass.row(i).map(|(j, v)| (i, j, v)));
                }
                CsrMatrix::from_triplets(n, n, t)
            }
        };
        InnerProduct {
            inner: Arc::new(IpInner {
                kind,
                mesh: self.mesh.id(),
                gram,
                factor: OnceLock::new(),
            }),
        }
    }

    /// Load vector `f_i = \int s phi_i` with a degree-5 rule per element.
    pub fn load_vector(&self, source: impl Fn(T, T) -> Cplx<T>) -> Vec<Cplx<T>> {
        let mesh = &self.mesh;
        let mut f = vec![Cplx::new(T::zero(), T::zero()); mesh.node_count()];
        for (e, el) in mesh.elements().iter().enumerate() {
            let area = mesh.element_area(e);
            let p = el.map(|k| mesh.nodes()[k]);
            for (l, w) in DEGREE5.iter() {
                let l = l.map(T::lit);
                let x = l[0] * p[0][0] + l[1] * p[1][0] + l[2] * p[2][0];
                let y = l[0] * p[0][1] + l[1] * p[1][1] + l[2] * p[2][1];
                let s = source(x, y) * (T::lit(*w) * area);
                for k in 0..3 {
                    f[el[k]] += s * l[k];
                }
            }
        }
        f
    }

    /// Squared L2 norm of a field.
    pub fn l2_norm_sqr(&self, u: &DiscreteField<T>) -> T {
        self.mass.form(u.values(), u.values()).re
    }
}

#[derive(Debug)]
struct IpInner<T: Real> {
    kind: InnerProductKind,
    mesh: MeshId,
    gram: CsrMatrix<T>,
    factor: OnceLock<BandedCholesky<T>>,
}

/// Gram matrix of a Hilbert-space inner product on nodal fields, with a
/// lazily built Cholesky factor for Riesz solves. Cheap to clone.
#[derive(Clone, Debug)]
pub struct InnerProduct<T: Real> {
    inner: Arc<IpInner<T>>,
}

impl<T: Real> InnerProduct<T> {
    pub fn kind(&self) -> InnerProductKind {
        self.inner.kind
    }

    pub fn mesh_id(&self) -> MeshId {
        self.inner.mesh
    }

    pub fn gram(&self) -> &CsrMatrix<T> {
        &self.inner.gram
    }

    pub fn size(&self) -> usize {
        self.inner.gram.nrows()
    }

    /// `(u, v) = v^H G u`, linear in the first argument.
    pub fn inner(&self, u: &DiscreteField<T>, v: &DiscreteField<T>) -> Cplx<T> {
        self.inner_values(u.values(), v.values())
    }

    pub fn inner_values(&self, u: &[Cplx<T>], v: &[Cplx<T>]) -> Cplx<T> {
        self.inner.gram.form(u, v)
    }

    pub fn norm_sqr(&self, u: &DiscreteField<T>) -> T {
        self.inner_values(u.values(), u.values()).re.max(T::zero())
    }

    pub fn norm(&self, u: &DiscreteField<T>) -> T {
        self.norm_sqr(u).sqrt()
    }

    pub fn factor(&self) -> Result<&BandedCholesky<T>> {
        if let Some(f) = self.inner.factor.get() {
            return Ok(f);
        }
        let f = BandedCholesky::factor(&self.inner.gram)
            .map_err(|e| Error::NotPositiveDefinite(format!("Gram matrix: {e}")))?;
        let _ = self.inner.factor.set(f);
        Ok(self.inner.factor.get().expect("factor just stored"))
    }

    /// Solves `G x = f`: the nodal values of the Riesz representer of the
    /// functional whose values on the nodal basis are `f`.
    pub fn riesz_solve(&self, f: &[Cplx<T>]) -> Result<Vec<Cplx<T>>> {
        if f.len() != self.size() {
            return Err(Error::Dimension(format!(
                "functional has {} entries, Gram has order {}",
                f.len(),
                self.size()
            )));
        }
        Ok(self.factor()?.solve(f))
    }

    /// Real-valued variant of [`Self::riesz_solve`].
    pub fn riesz_solve_real(&self, f: &[T]) -> Result<Vec<T>> {
        if f.len() != self.size() {
            return Err(Error::Dimension("functional length".into()));
        }
        Ok(self.factor()?.solve(f))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::real;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn space(n: usize) -> FemSpace<f64> {
        FemSpace::new(Mesh::new(n, n).unwrap())
    }

    #[test]
    fn constant_has_unit_l2_norm() {
        let s = space(9);
        let ip = s.inner_product(InnerProductKind::L2);
        let c = DiscreteField::from_fn(s.mesh(), |_, _| Cplx::new(0.6, -0.8));
        assert!((ip.norm_sqr(&c) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn x1_h1_norm() {
        let s = space(65);
        let ip = s.inner_product(InnerProductKind::H1);
        let u = DiscreteField::from_fn(s.mesh(), |x, _| real(x));
        assert!((ip.norm_sqr(&u) - 4.0 / 3.0).abs() < 2e-3);
    }

    #[test]
    fn gram_is_symmetric() {
        let s = space(17);
        for kind in [InnerProductKind::H1, InnerProductKind::L2] {
            let g = s.inner_product(kind);
            assert!(g.gram().hermitian_residual() <= 1e-14 * g.gram().max_abs());
        }
    }

    #[test]
    fn stiffness_annihilates_constants() {
        let s = space(8);
        let ones = vec![real(1.0); s.mesh().node_count()];
        let r = s.stiffness().mul_complex(&ones);
        assert!(r.iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn load_vector_integrates_polynomials() {
        let s = space(5);
        let f = s.load_vector(|x, y| real(x * x * y));
        let total: f64 = f.iter().map(|z| z.re).sum();
        assert!((total - 1.0 / 6.0).abs() < 1e-14);
    }

    #[test]
    fn riesz_solve_inverts_gram() {
        let s = space(12);
        let ip = s.inner_product(InnerProductKind::H1);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x: Vec<Cplx<f64>> = (0..ip.size())
            .map(|_| Cplx::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let f = ip.gram().mul_complex(&x);
        let back = ip.riesz_solve(&f).unwrap();
        for (a, b) in back.iter().zip(&x) {
            assert!((a - b).norm() < 1e-11);
        }
    }
}

use crate::error::{Error, Result};
use crate::scalar::{Cplx, Real};

use super::mesh::{Mesh, MeshId};

/// Complex nodal vector on a structured mesh.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteField<T: Real> {
    mesh: MeshId,
    values: Vec<Cplx<T>>,
}

impl<T: Real> DiscreteField<T> {
    pub fn new(mesh: &Mesh<T>, values: Vec<Cplx<T>>) -> Result<Self> {
        Self::from_values(mesh.id(), values, mesh.node_count())
    }

    pub(crate) fn from_values(mesh: MeshId, values: Vec<Cplx<T>>, nodes: usize) -> Result<Self> {
        if values.len() != nodes {
            return Err(Error::Dimension(format!(
                "field has {} values, mesh has {nodes} nodes",
                values.len()
            )));
        }
        Ok(Self { mesh, values })
    }

    pub fn zeros(mesh: &Mesh<T>) -> Self {
        Self {
            mesh: mesh.id(),
            values: vec![Cplx::new(T::zero(), T::zero()); mesh.node_count()],
        }
    }

    /// Nodal interpolant of `f`.
    pub fn from_fn(mesh: &Mesh<T>, mut f: impl FnMut(T, T) -> Cplx<T>) -> Self {
        Self {
            mesh: mesh.id(),
            values: mesh.nodes().iter().map(|p| f(p[0], p[1])).collect(),
        }
    }

    pub fn mesh_id(&self) -> MeshId {
        self.mesh
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Cplx<T>] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Cplx<T>] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Cplx<T>> {
        self.values
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    fn check_same(&self, other: &Self) {
        assert_eq!(self.mesh, other.mesh, "fields live on different meshes");
    }

    /// `self += a * x`
    pub fn axpy(&mut self, a: Cplx<T>, x: &Self) {
        self.check_same(x);
        for (s, v) in self.values.iter_mut().zip(&x.values) {
            *s += a * *v;
        }
    }

    pub fn scaled(&self, a: Cplx<T>) -> Self {
        Self {
            mesh: self.mesh,
            values: self.values.iter().map(|v| *v * a).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.check_same(other);
        Self {
            mesh: self.mesh,
            values: self.values.iter().zip(&other.values).map(|(a, b)| *a - *b).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_same(other);
        Self {
            mesh: self.mesh,
            values: self.values.iter().zip(&other.values).map(|(a, b)| *a + *b).collect(),
        }
    }

    /// `sum_k coeffs[k] * fields[k]`; all fields must share the mesh.
    pub fn combination(mesh: &Mesh<T>, fields: &[Self], coeffs: &[Cplx<T>]) -> Result<Self> {
        if fields.len() != coeffs.len() {
            return Err(Error::Dimension(format!(
                "{} fields but {} coefficients",
                fields.len(),
                coeffs.len()
            )));
        }
        let mut out = Self::zeros(mesh);
        for (f, c) in fields.iter().zip(coeffs) {
            if f.mesh != out.mesh {
                return Err(Error::Dimension("field on a different mesh".into()));
            }
            out.axpy(*c, f);
        }
        Ok(out)
    }

    /// P1 interpolation at arbitrary points of the unit square.
    pub fn evaluate(&self, mesh: &Mesh<T>, points: &[[T; 2]]) -> Result<Vec<Cplx<T>>> {
        if mesh.id() != self.mesh {
            return Err(Error::Dimension("field evaluated on a foreign mesh".into()));
        }
        points
            .iter()
            .map(|p| {
                let loc = mesh.locate(*p)?;
                Ok(loc
                    .iter()
                    .fold(Cplx::new(T::zero(), T::zero()), |acc, (k, w)| {
                        acc + self.values[*k] * *w
                    }))
            })
            .collect()
    }
}

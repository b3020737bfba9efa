use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::field::{DiscreteField, InnerProduct, Mesh, MeshId};
use crate::linalg::dense::{self, CMatrix, CVector};
use crate::scalar::{Cplx, Real};

use super::sensor::{apply_weights, Sensor};

/// Ordered sensors with their Riesz representers `q_m` and Gram matrix
/// `A_{m,m'} = l_m(q_{m'})`.
#[derive(Clone, Debug)]
pub struct SensorSet<T: Real> {
    sensors: Vec<Sensor<T>>,
    weights: Vec<Vec<(usize, T)>>,
    representers: Vec<DiscreteField<T>>,
    a: CMatrix<T>,
    ip: InnerProduct<T>,
    mesh: MeshId,
}

struct Column<T: Real> {
    weights: Vec<(usize, T)>,
    representer: DiscreteField<T>,
}

fn column<T: Real>(mesh: &Mesh<T>, ip: &InnerProduct<T>, s: &Sensor<T>) -> Result<Column<T>> {
    let weights = s.nodal_weights(mesh);
    let mut f = vec![T::zero(); mesh.node_count()];
    for (k, w) in &weights {
        f[*k] = *w;
    }
    let q = ip.riesz_solve_real(&f)?;
    let representer = DiscreteField::new(mesh, q.into_iter().map(|v| Cplx::new(v, T::zero())).collect())?;
    Ok(Column { weights, representer })
}

fn warn_duplicates<T: Real>(sensors: &[Sensor<T>], new: &Sensor<T>) {
    if sensors.iter().any(|s| s == new) {
        log::warn!(
            "duplicate sensor at ({}, {}) with width {}: the Gram matrix will be singular",
            new.center[0],
            new.center[1],
            new.width
        );
    }
}

impl<T: Real> SensorSet<T> {
    pub fn build(mesh: &Mesh<T>, ip: &InnerProduct<T>, sensors: Vec<Sensor<T>>) -> Result<Self> {
        if sensors.is_empty() {
            return Err(Error::InvalidParameter("a sensor set needs at least one sensor".into()));
        }
        if ip.mesh_id() != mesh.id() {
            return Err(Error::Dimension("inner product built on a different mesh".into()));
        }
        for (i, s) in sensors.iter().enumerate() {
            warn_duplicates(&sensors[..i], s);
        }
        ip.factor()?;
        let cols: Vec<Column<T>> = sensors
            .par_iter()
            .map(|s| column(mesh, ip, s))
            .collect::<Result<_>>()?;
        let m = sensors.len();
        let mut a = CMatrix::zeros(m, m);
        for i in 0..m {
            for j in 0..m {
                a[(i, j)] = apply_weights(&cols[i].weights, cols[j].representer.values());
            }
        }
        let (weights, representers) = cols.into_iter().map(|c| (c.weights, c.representer)).unzip();
        let set = Self {
            sensors,
            weights,
            representers,
            a: symmetrize(a),
            ip: ip.clone(),
            mesh: mesh.id(),
        };
        set.check_definite()?;
        Ok(set)
    }

    fn check_definite(&self) -> Result<()> {
        dense::cholesky(&self.a, "sensor Gram matrix A").map(|_| ())
    }

    /// Copy of the set with one more sensor; only the new row of `A` is computed.
    pub fn with_sensor(&self, mesh: &Mesh<T>, sensor: Sensor<T>) -> Result<Self> {
        if mesh.id() != self.mesh {
            return Err(Error::Dimension("sensor set built on a different mesh".into()));
        }
        warn_duplicates(&self.sensors, &sensor);
        let col = column(mesh, &self.ip, &sensor)?;
        let m = self.len();
        let mut a = self.a.clone().resize(m + 1, m + 1, Cplx::new(T::zero(), T::zero()));
        for j in 0..m {
            let v = apply_weights(&col.weights, self.representers[j].values());
            let w = apply_weights(&self.weights[j], col.representer.values());
            let s = (v + w) * T::lit(0.5);
            a[(m, j)] = s;
            a[(j, m)] = s.conj();
        }
        a[(m, m)] = apply_weights(&col.weights, col.representer.values());
        let mut out = self.clone();
        out.sensors.push(sensor);
        out.weights.push(col.weights);
        out.representers.push(col.representer);
        out.a = a;
        Ok(out)
    }

    /// The first `m` sensors as a set of their own.
    pub fn prefix(&self, m: usize) -> Result<Self> {
        if m == 0 || m > self.len() {
            return Err(Error::Dimension(format!("prefix {m} of a {}-sensor set", self.len())));
        }
        Ok(Self {
            sensors: self.sensors[..m].to_vec(),
            weights: self.weights[..m].to_vec(),
            representers: self.representers[..m].to_vec(),
            a: self.a.view((0, 0), (m, m)).into_owned(),
            ip: self.ip.clone(),
            mesh: self.mesh,
        })
    }

    pub fn len(&self) -> usize {
        self.sensors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sensors.is_empty()
    }

    pub fn sensors(&self) -> &[Sensor<T>] {
        &self.sensors
    }

    pub fn centers(&self) -> Vec<[T; 2]> {
        self.sensors.iter().map(|s| s.center).collect()
    }

    pub fn representers(&self) -> &[DiscreteField<T>] {
        &self.representers
    }

    /// Sparse nodal weights `l_m(phi_i)` of sensor `m`.
    pub fn weights(&self, m: usize) -> &[(usize, T)] {
        &self.weights[m]
    }

    pub fn gram(&self) -> &CMatrix<T> {
        &self.a
    }

    pub fn inner_product(&self) -> &InnerProduct<T> {
        &self.ip
    }

    pub fn mesh_id(&self) -> MeshId {
        self.mesh
    }

    /// `[l_1(v), ..., l_M(v)]`
    pub fn apply(&self, field: &DiscreteField<T>) -> CVector<T> {
        assert_eq!(field.mesh_id(), self.mesh, "field on a foreign mesh");
        CVector::from_iterator(
            self.len(),
            self.weights.iter().map(|w| apply_weights(w, field.values())),
        )
    }

    /// `sum_m eta_m q_m`
    pub fn expand(&self, eta: &[Cplx<T>]) -> DiscreteField<T> {
        assert_eq!(eta.len(), self.len());
        let mut out = self.representers[0].scaled(eta[0]);
        for (q, c) in self.representers.iter().zip(eta).skip(1) {
            out.axpy(*c, q);
        }
        out
    }

    /// Gram of the representers computed through the field inner product,
    /// `(q_{m'}, q_m)`; equal to [`Self::gram`] up to rounding.
    pub fn gram_from_representers(&self) -> CMatrix<T> {
        let m = self.len();
        CMatrix::from_fn(m, m, |i, j| self.ip.inner(&self.representers[j], &self.representers[i]))
    }

    /// Content hash of sensor positions, widths, mesh and inner product.
    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(format!("{}x{}:{}", self.mesh.nx, self.mesh.ny, self.ip.kind().tag()));
        for s in &self.sensors {
            for v in [s.center[0], s.center[1], s.width] {
                h.update(v.as_f64().to_le_bytes());
            }
        }
        hex::encode(h.finalize())
    }
}

fn symmetrize<T: Real>(a: CMatrix<T>) -> CMatrix<T> {
    let at = a.adjoint();
    (a + at).map(|z| z * T::lit(0.5))
}

/// Observation vector of one synthetic experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct Measurement<T: Real> {
    pub y: CVector<T>,
    pub noise_level: T,
    pub seed: u64,
}

/// `y_m = l_m(u) (1 + delta r_m)` with `r_m` i.i.d. standard normal drawn from `seed`.
pub fn observe<T: Real>(
    set: &SensorSet<T>,
    field: &DiscreteField<T>,
    noise_level: T,
    seed: u64,
) -> Result<Measurement<T>> {
    if !(noise_level >= T::zero()) {
        return Err(Error::InvalidParameter(format!(
            "noise level must be nonnegative, got {noise_level}"
        )));
    }
    let mut y = set.apply(field);
    if noise_level > T::zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for v in y.iter_mut() {
            let r: f64 = StandardNormal.sample(&mut rng);
            *v *= T::one() + noise_level * T::lit(r);
        }
    }
    Ok(Measurement {
        y,
        noise_level,
        seed,
    })
}

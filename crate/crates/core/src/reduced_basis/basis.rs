use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::field::{DiscreteField, InnerProduct, MeshId};
use crate::linalg::dense::CMatrix;
use crate::observation::SensorSet;
use crate::scalar::{Cplx, Real};

use super::snapshots::SnapshotSet;

/// Orthonormal background modes `zeta_n`, optionally bound to a sensor set
/// through `B_{mn} = l_m(zeta_n)`.
#[derive(Clone, Debug)]
pub struct BackgroundBasis<T: Real> {
    modes: Vec<DiscreteField<T>>,
    singular_values: Vec<T>,
    ip: InnerProduct<T>,
    mesh: MeshId,
    coupling: Option<(CMatrix<T>, String)>,
}

fn zero<T: Real>() -> Cplx<T> {
    Cplx::new(T::zero(), T::zero())
}

/// Gram-Schmidt of `v` against orthonormal `basis`, two passes.
fn orthogonalize<T: Real>(ip: &InnerProduct<T>, basis: &[DiscreteField<T>], v: &mut DiscreteField<T>) {
    for _ in 0..2 {
        for z in basis {
            let c = ip.inner(v, z);
            v.axpy(-c, z);
        }
    }
}

/// Rotates `v` so that its largest-modulus nodal value is real and positive.
fn fix_phase<T: Real>(v: &mut DiscreteField<T>) {
    let mut best = zero::<T>();
    let mut best_abs = T::zero();
    for z in v.values() {
        let a = z.re * z.re + z.im * z.im;
        if a > best_abs {
            best_abs = a;
            best = *z;
        }
    }
    if best_abs > T::zero() {
        let rot = best.conj() / best_abs.sqrt();
        for z in v.values_mut() {
            *z *= rot;
        }
    }
}

impl<T: Real> BackgroundBasis<T> {
    /// Orthonormalizes `fields` in order (two-pass Gram-Schmidt). Fields that
    /// are numerically dependent on the previous ones are rejected.
    pub fn from_fields(ip: &InnerProduct<T>, fields: Vec<DiscreteField<T>>) -> Result<Self> {
        let mesh = ip.mesh_id();
        let mut modes: Vec<DiscreteField<T>> = Vec::with_capacity(fields.len());
        for (k, mut f) in fields.into_iter().enumerate() {
            if f.mesh_id() != mesh {
                return Err(Error::Dimension("basis field on a different mesh".into()));
            }
            let before = ip.norm(&f);
            orthogonalize(ip, &modes, &mut f);
            let after = ip.norm(&f);
            if !(after > before * T::lit(1e-10)) {
                return Err(Error::InvalidParameter(format!("basis field {k} is linearly dependent")));
            }
            modes.push(f.scaled(Cplx::new(T::one() / after, T::zero())));
        }
        Ok(Self {
            modes,
            singular_values: Vec::new(),
            ip: ip.clone(),
            mesh,
            coupling: None,
        })
    }

    /// Empty background (update-only reconstruction).
    pub fn empty(ip: &InnerProduct<T>) -> Self {
        Self {
            modes: Vec::new(),
            singular_values: Vec::new(),
            ip: ip.clone(),
            mesh: ip.mesh_id(),
            coupling: None,
        }
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn modes(&self) -> &[DiscreteField<T>] {
        &self.modes
    }

    /// Full snapshot spectrum, nonincreasing (empty for bases not built by POD).
    pub fn singular_values(&self) -> &[T] {
        &self.singular_values
    }

    pub fn inner_product(&self) -> &InnerProduct<T> {
        &self.ip
    }

    pub fn mesh_id(&self) -> MeshId {
        self.mesh
    }

    /// The nested basis made of the first `n` modes; the coupling matrix is
    /// truncated accordingly.
    pub fn truncate(&self, n: usize) -> Result<Self> {
        if n > self.len() {
            return Err(Error::Dimension(format!("cannot keep {n} of {} modes", self.len())));
        }
        Ok(Self {
            modes: self.modes[..n].to_vec(),
            singular_values: self.singular_values.clone(),
            ip: self.ip.clone(),
            mesh: self.mesh,
            coupling: self
                .coupling
                .as_ref()
                .map(|(b, h)| (b.columns(0, n).into_owned(), h.clone())),
        })
    }

    /// Fills `B_{mn} = l_m(zeta_n)`.
    pub fn bind_sensors(&self, set: &SensorSet<T>) -> Result<Self> {
        if set.mesh_id() != self.mesh {
            return Err(Error::Dimension("sensor set and basis live on different meshes".into()));
        }
        if set.inner_product().kind() != self.ip.kind() {
            return Err(Error::Dimension("sensor set and basis use different inner products".into()));
        }
        let mut b = CMatrix::zeros(set.len(), self.len());
        for (n, z) in self.modes.iter().enumerate() {
            b.set_column(n, &set.apply(z));
        }
        let mut out = self.clone();
        out.coupling = Some((b, set.hash()));
        Ok(out)
    }

    /// Coupling matrix `B` (M x N), if sensors were bound.
    pub fn coupling(&self) -> Option<&CMatrix<T>> {
        self.coupling.as_ref().map(|(b, _)| b)
    }

    /// Hash of the sensor set the coupling matrix was computed for.
    pub fn bound_sensor_hash(&self) -> Option<&str> {
        self.coupling.as_ref().map(|(_, h)| h.as_str())
    }

    /// Coefficients `(field, zeta_n)`.
    pub fn coefficients(&self, field: &DiscreteField<T>) -> Vec<Cplx<T>> {
        self.modes.iter().map(|z| self.ip.inner(field, z)).collect()
    }

    /// `sum_n z_n zeta_n`
    pub fn expand(&self, z: &[Cplx<T>]) -> Result<DiscreteField<T>> {
        if z.len() != self.len() {
            return Err(Error::Dimension(format!("{} coefficients for {} modes", z.len(), self.len())));
        }
        let mut out = DiscreteField::from_values(self.mesh, vec![zero(); self.ip.size()], self.ip.size())?;
        for (m, c) in self.modes.iter().zip(z) {
            out.axpy(*c, m);
        }
        Ok(out)
    }

    /// Orthogonal projection onto the span of the modes.
    pub fn project(&self, field: &DiscreteField<T>) -> DiscreteField<T> {
        self.expand(&self.coefficients(field))
            .expect("coefficient count matches by construction")
    }

    /// Best-fit distance `||u - P_Z u||` in the basis inner product.
    pub fn projection_error(&self, field: &DiscreteField<T>) -> T {
        self.ip.norm(&field.sub(&self.project(field)))
    }

    /// Relative RMS residual energy of the snapshot set left out by the first
    /// `n` modes, `sqrt(sum_{k>n} s_k^2 / sum_k s_k^2)`.
    pub fn manifold_error(&self, n: usize) -> Option<T> {
        if self.singular_values.is_empty() {
            return None;
        }
        let total = self.singular_values.iter().fold(T::zero(), |a, s| a + *s * *s);
        let tail = self
            .singular_values
            .iter()
            .skip(n)
            .fold(T::zero(), |a, s| a + *s * *s);
        Some(if total > T::zero() { (tail / total).sqrt() } else { T::zero() })
    }

    /// Content hash of the modes and inner product.
    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(format!("{}x{}:{}:{}", self.mesh.nx, self.mesh.ny, self.ip.kind().tag(), self.len()));
        for m in &self.modes {
            for z in m.values() {
                h.update(z.re.as_f64().to_le_bytes());
                h.update(z.im.as_f64().to_le_bytes());
            }
        }
        hex::encode(h.finalize())
    }

    pub(crate) fn from_parts(
        ip: &InnerProduct<T>,
        modes: Vec<DiscreteField<T>>,
        singular_values: Vec<T>,
    ) -> Self {
        Self {
            modes,
            singular_values,
            ip: ip.clone(),
            mesh: ip.mesh_id(),
            coupling: None,
        }
    }
}

/// POD of the snapshot set in the given inner product, keeping `n` modes.
///
/// Method of snapshots in square-root form: with `G = L L^T`, the weighted
/// snapshot matrix `W = L^T U` has the snapshot Gram `W^H W`, and the SVD of
/// the triangular factor of `W` yields its eigenpairs without squaring the
/// condition number.
pub fn pod<T: Real>(snaps: &SnapshotSet<T>, ip: &InnerProduct<T>, n: usize) -> Result<BackgroundBasis<T>> {
    pod_fields(&snaps.snapshots, ip, n)
}

/// [`pod`] over a plain list of fields.
pub fn pod_fields<T: Real>(fields: &[DiscreteField<T>], ip: &InnerProduct<T>, n: usize) -> Result<BackgroundBasis<T>> {
    let k = fields.len();
    if k == 0 {
        return Err(Error::InvalidParameter("no snapshots".into()));
    }
    if n > k {
        return Err(Error::InvalidParameter(format!("{n} modes requested from {k} snapshots")));
    }
    if fields.iter().any(|f| f.mesh_id() != ip.mesh_id()) {
        return Err(Error::Dimension("snapshot on a different mesh".into()));
    }
    let chol = ip.factor()?;
    let rows = ip.size();
    let mut w = CMatrix::<T>::zeros(rows, k);
    for (j, f) in fields.iter().enumerate() {
        let col = chol.mul_upper(f.values());
        for (i, v) in col.into_iter().enumerate() {
            w[(i, j)] = v;
        }
    }
    let r = w.qr().r();
    let svd = r.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| {
        svd.singular_values[b]
            .partial_cmp(&svd.singular_values[a])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    let sigma: Vec<T> = order.iter().map(|&i| svd.singular_values[i]).collect();
    let smax = sigma.first().copied().unwrap_or_else(T::zero);
    let tol = smax * T::machine_eps() * T::from_usize_lossy(100 * k);
    let rank = sigma.iter().take_while(|s| **s > tol).count();
    let keep = n.min(rank);
    if keep < n {
        log::warn!("snapshot set has numerical rank {rank}; truncating background to {keep} modes");
    }
    let mesh = ip.mesh_id();
    let mut modes: Vec<DiscreteField<T>> = Vec::with_capacity(keep);
    for (slot, &idx) in order.iter().take(keep).enumerate() {
        let mut vals = vec![zero::<T>(); rows];
        for (j, f) in fields.iter().enumerate() {
            // V = (V^H)^H, so V_{j,idx} = conj(v_t[idx, j])
            let c = v_t[(idx, j)].conj() / sigma[slot];
            for (acc, u) in vals.iter_mut().zip(f.values()) {
                *acc += *u * c;
            }
        }
        let mut mode = DiscreteField::from_values(mesh, vals, rows)?;
        orthogonalize(ip, &modes, &mut mode);
        let nrm = ip.norm(&mode);
        if !(nrm > T::lit(1e-6)) {
            log::warn!("POD mode {slot} lost to cancellation; truncating background to {slot} modes");
            break;
        }
        let mut mode = mode.scaled(Cplx::new(T::one() / nrm, T::zero()));
        fix_phase(&mut mode);
        modes.push(mode);
    }
    Ok(BackgroundBasis::from_parts(ip, modes, sigma))
}

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::dense::{CMatrix, CVector};
use crate::observation::SensorSet;
use crate::reduced_basis::BackgroundBasis;
use crate::scalar::{Cplx, Real};

use super::dataset::TrainingSet;
use super::mlp::{Mlp, Tape};
use super::realify::derealify;
use super::trunk::TrunkBasis;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Coordinate-input trunk, orthogonality encouraged by a penalty.
    Weak,
    /// Fixed trunk projected out of the background.
    Strong,
}

impl Mode {
    pub fn tag(self) -> &'static str {
        match self {
            Mode::Weak => "weak",
            Mode::Strong => "strong",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "weak" => Ok(Mode::Weak),
            "strong" => Ok(Mode::Strong),
            other => Err(Error::Parse(format!("unknown model mode {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Trunk<T: Real> {
    Network(Mlp<T>),
    Basis(TrunkBasis<T>),
}

/// Hidden layer counts and width; a width of 0 means one unit per sensor.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Architecture {
    pub branch_layers: usize,
    pub trunk_layers: usize,
    pub width: usize,
}

impl Default for Architecture {
    fn default() -> Self {
        Self {
            branch_layers: 10,
            trunk_layers: 4,
            width: 0,
        }
    }
}

impl Architecture {
    fn widths(&self, input: usize, output: usize, layers: usize, m: usize) -> Vec<usize> {
        let w = if self.width == 0 { m } else { self.width };
        std::iter::once(input)
            .chain(std::iter::repeat_n(w, layers))
            .chain(std::iter::once(output))
            .collect()
    }
}

/// Affine input standardization and a single output scale. A scalar output
/// scale keeps the strong variant exactly orthogonal.
#[derive(Clone, Debug, PartialEq)]
pub struct Normalization<T> {
    pub input_mean: Vec<T>,
    pub input_scale: Vec<T>,
    pub output_scale: T,
}

impl<T: Real> Normalization<T> {
    pub fn identity(m: usize) -> Self {
        Self {
            input_mean: vec![T::zero(); m],
            input_scale: vec![T::one(); m],
            output_scale: T::one(),
        }
    }

    pub fn fit(data: &TrainingSet<T>) -> Self {
        let k = T::from_usize_lossy(data.len().max(1));
        let mut input_mean = Vec::with_capacity(data.sensors());
        let mut input_scale = Vec::with_capacity(data.sensors());
        for row in data.inputs.row_iter() {
            let mean = row.sum() / k;
            let var = row.iter().fold(T::zero(), |a, v| a + (*v - mean) * (*v - mean)) / k;
            let sd = var.sqrt();
            input_mean.push(mean);
            input_scale.push(if sd > T::lit(1e-12) * (T::one() + mean.abs()) { sd } else { T::one() });
        }
        let count = T::from_usize_lossy(data.targets.len().max(1));
        let rms = (data.targets.norm_squared() / count).sqrt();
        Self {
            input_mean,
            input_scale,
            output_scale: if rms > T::tiny() && rms.is_finite() { rms } else { T::one() },
        }
    }

    pub fn inputs(&self, v: &DMatrix<T>) -> DMatrix<T> {
        DMatrix::from_fn(v.nrows(), v.ncols(), |i, j| (v[(i, j)] - self.input_mean[i]) / self.input_scale[i])
    }

    pub fn targets(&self, y: &DMatrix<T>) -> DMatrix<T> {
        y.map(|v| v / self.output_scale)
    }
}

/// Branch/trunk operator network predicting update coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorModel<T: Real> {
    pub branch: Mlp<T>,
    pub trunk: Trunk<T>,
    pub normalization: Normalization<T>,
    /// Data and penalty weights of the training loss.
    pub loss_weights: [T; 2],
    pub(crate) centers: Vec<[T; 2]>,
    pub(crate) coupling: CMatrix<T>,
    pub(crate) sensor_hash: String,
    pub(crate) basis_hash: String,
}

pub(crate) fn coupling_of<T: Real>(set: &SensorSet<T>, basis: &BackgroundBasis<T>) -> Result<CMatrix<T>> {
    let b = basis
        .coupling()
        .ok_or_else(|| Error::Dimension("basis has no sensors bound".into()))?;
    if basis.bound_sensor_hash() != Some(set.hash().as_str()) {
        return Err(Error::Dimension("basis was bound to a different sensor set".into()));
    }
    Ok(b.clone())
}

/// Intermediate values of one forward pass in normalized units.
struct Pass<T: Real> {
    branch: Tape<T>,
    trunk: Option<Tape<T>>,
    /// Realified normalized prediction, `2M x K`.
    out: DMatrix<T>,
}

impl<T: Real> OperatorModel<T> {
    pub fn weak(
        set: &SensorSet<T>,
        basis: &BackgroundBasis<T>,
        arch: Architecture,
        normalization: Normalization<T>,
        loss_weights: [T; 2],
        seed: u64,
    ) -> Result<Self> {
        let m = set.len();
        let branch = Mlp::new(&arch.widths(m, 2 * m, arch.branch_layers, m), seed)?;
        let trunk = Mlp::new(&arch.widths(2, 2 * m, arch.trunk_layers, m), seed.wrapping_add(1))?;
        Self::assemble(set, basis, branch, Trunk::Network(trunk), normalization, loss_weights)
    }

    pub fn strong(
        set: &SensorSet<T>,
        basis: &BackgroundBasis<T>,
        arch: Architecture,
        normalization: Normalization<T>,
        seed: u64,
    ) -> Result<Self> {
        let m = set.len();
        let b = coupling_of(set, basis)?;
        let trunk = TrunkBasis::build(set.gram(), &b)?;
        let branch = Mlp::new(&arch.widths(m, 2 * m, arch.branch_layers, m), seed)?;
        Self::assemble(set, basis, branch, Trunk::Basis(trunk), normalization, [T::one(), T::zero()])
    }

    pub(crate) fn assemble(
        set: &SensorSet<T>,
        basis: &BackgroundBasis<T>,
        branch: Mlp<T>,
        trunk: Trunk<T>,
        normalization: Normalization<T>,
        loss_weights: [T; 2],
    ) -> Result<Self> {
        let m = set.len();
        let coupling = coupling_of(set, basis)?;
        let trunk_ok = match &trunk {
            Trunk::Network(t) => t.input_dim() == 2 && t.output_dim() == 2 * m,
            Trunk::Basis(t) => t.matrix().shape() == (m, m),
        };
        if branch.input_dim() != m || branch.output_dim() != 2 * m || !trunk_ok {
            return Err(Error::Dimension(format!("network shapes do not fit {m} sensors")));
        }
        if normalization.input_mean.len() != m || normalization.input_scale.len() != m {
            return Err(Error::Dimension("normalization does not fit the sensor count".into()));
        }
        Ok(Self {
            branch,
            trunk,
            normalization,
            loss_weights,
            centers: set.centers(),
            coupling,
            sensor_hash: set.hash(),
            basis_hash: basis.hash(),
        })
    }

    pub fn mode(&self) -> Mode {
        match self.trunk {
            Trunk::Network(_) => Mode::Weak,
            Trunk::Basis(_) => Mode::Strong,
        }
    }

    pub fn sensors(&self) -> usize {
        self.centers.len()
    }

    pub fn sensor_hash(&self) -> &str {
        &self.sensor_hash
    }

    pub fn basis_hash(&self) -> &str {
        &self.basis_hash
    }

    pub fn coupling(&self) -> &CMatrix<T> {
        &self.coupling
    }

    /// Trainable parameters: branch, then the trunk network if any.
    pub fn parameters(&self) -> Vec<T> {
        let mut p = self.branch.parameters().to_vec();
        if let Trunk::Network(t) = &self.trunk {
            p.extend_from_slice(t.parameters());
        }
        p
    }

    pub fn set_parameters(&mut self, p: &[T]) -> Result<()> {
        let nb = self.branch.parameter_count();
        let nt = match &self.trunk {
            Trunk::Network(t) => t.parameter_count(),
            Trunk::Basis(_) => 0,
        };
        if p.len() != nb + nt {
            return Err(Error::Dimension(format!("{} parameters, expected {}", p.len(), nb + nt)));
        }
        self.branch.parameters_mut().copy_from_slice(&p[..nb]);
        if let Trunk::Network(t) = &mut self.trunk {
            t.parameters_mut().copy_from_slice(&p[nb..]);
        }
        Ok(())
    }

    fn centers_matrix(&self) -> DMatrix<T> {
        DMatrix::from_fn(2, self.centers.len(), |i, j| self.centers[j][i])
    }

    /// Forward pass from normalized inputs to normalized realified outputs.
    fn pass(&self, x: &DMatrix<T>) -> Result<Pass<T>> {
        let m = self.sensors();
        let branch = self.branch.forward_tape(x)?;
        match &self.trunk {
            Trunk::Basis(basis) => {
                let out = basis.realified() * branch.output();
                Ok(Pass {
                    branch,
                    trunk: None,
                    out,
                })
            }
            Trunk::Network(net) => {
                let tape = net.forward_tape(&self.centers_matrix())?;
                let (t, coef) = (tape.output(), branch.output());
                let mut out = DMatrix::zeros(2 * m, x.ncols());
                out.rows_mut(0, m).copy_from(&(t.rows(0, m).transpose() * coef.rows(0, m)));
                out.rows_mut(m, m).copy_from(&(t.rows(m, m).transpose() * coef.rows(m, m)));
                Ok(Pass {
                    branch,
                    trunk: Some(tape),
                    out,
                })
            }
        }
    }

    /// `B^H eta` for every column of a realified batch.
    fn project(&self, out: &DMatrix<T>) -> CMatrix<T> {
        let m = self.sensors();
        let eta = CMatrix::from_fn(m, out.ncols(), |i, j| Cplx::new(out[(i, j)], out[(m + i, j)]));
        self.coupling.adjoint() * eta
    }

    /// Training loss in normalized units: the weighted sum of the mean
    /// squared error over all realified entries and the batch mean of
    /// `||B^H eta||^2`.
    pub fn loss(&self, x: &DMatrix<T>, y: &DMatrix<T>) -> Result<T> {
        let pass = self.pass(x)?;
        Ok(self.loss_of(&pass.out, y))
    }

    fn loss_of(&self, out: &DMatrix<T>, y: &DMatrix<T>) -> T {
        let [w1, w2] = self.loss_weights;
        let k = T::from_usize_lossy(out.ncols().max(1));
        let mse = (out - y).norm_squared() / T::from_usize_lossy(out.len().max(1));
        let mut loss = w1 * mse;
        if w2 != T::zero() {
            let c = self.project(out);
            loss += w2 * c.iter().fold(T::zero(), |s, z| s + z.norm_sqr()) / k;
        }
        loss
    }

    /// Loss and its gradient with respect to [`parameters`](Self::parameters).
    pub fn loss_and_gradient(&self, x: &DMatrix<T>, y: &DMatrix<T>) -> Result<(T, Vec<T>)> {
        if y.shape() != (2 * self.sensors(), x.ncols()) {
            return Err(Error::Dimension(format!("targets are {:?}", y.shape())));
        }
        let m = self.sensors();
        let pass = self.pass(x)?;
        let loss = self.loss_of(&pass.out, y);
        let [w1, w2] = self.loss_weights;
        let two = T::lit(2.0);
        let mut d_out = (&pass.out - y) * (two * w1 / T::from_usize_lossy(pass.out.len().max(1)));
        if w2 != T::zero() {
            let g = &self.coupling * self.project(&pass.out);
            let f = two * w2 / T::from_usize_lossy(x.ncols().max(1));
            for j in 0..g.ncols() {
                for i in 0..m {
                    d_out[(i, j)] += f * g[(i, j)].re;
                    d_out[(m + i, j)] += f * g[(i, j)].im;
                }
            }
        }
        let grad = match (&self.trunk, &pass.trunk) {
            (Trunk::Network(net), Some(tape)) => {
                let (t, coef) = (tape.output(), pass.branch.output());
                let (dre, dim) = (d_out.rows(0, m), d_out.rows(m, m));
                let mut d_coef = DMatrix::zeros(2 * m, x.ncols());
                d_coef.rows_mut(0, m).copy_from(&(t.rows(0, m) * dre));
                d_coef.rows_mut(m, m).copy_from(&(t.rows(m, m) * dim));
                let mut d_t = DMatrix::zeros(2 * m, m);
                d_t.rows_mut(0, m).copy_from(&(coef.rows(0, m) * dre.transpose()));
                d_t.rows_mut(m, m).copy_from(&(coef.rows(m, m) * dim.transpose()));
                let mut grad = self.branch.backward(&pass.branch, &d_coef).0;
                grad.extend(net.backward(tape, &d_t).0);
                grad
            }
            (Trunk::Basis(basis), _) => {
                let d_coef = basis.realified().transpose() * &d_out;
                self.branch.backward(&pass.branch, &d_coef).0
            }
            (Trunk::Network(_), None) => unreachable!("weak pass always tapes the trunk"),
        };
        Ok((loss, grad))
    }

    /// Root mean square of `||B^H eta||` over a batch, in normalized units.
    pub fn penalty_residual(&self, x: &DMatrix<T>) -> Result<T> {
        let pass = self.pass(x)?;
        let c = self.project(&pass.out);
        let k = T::from_usize_lossy(x.ncols().max(1));
        Ok((c.iter().fold(T::zero(), |s, z| s + z.norm_sqr()) / k).sqrt())
    }

    /// Realified update coefficients in physical units for raw inputs
    /// stored column-wise.
    pub fn predict_batch(&self, v: &DMatrix<T>) -> Result<DMatrix<T>> {
        if v.nrows() != self.sensors() {
            return Err(Error::Dimension(format!(
                "model expects {} sensor values, got {}",
                self.sensors(),
                v.nrows()
            )));
        }
        let x = self.normalization.inputs(v);
        Ok(self.pass(&x)?.out * self.normalization.output_scale)
    }

    /// Update coefficients for forcing values sampled at the sensor centers
    /// of `set`. No linear system is solved.
    pub fn predict_update(&self, set: &SensorSet<T>, v: &[T]) -> Result<CVector<T>> {
        if set.hash() != self.sensor_hash {
            return Err(Error::Dimension("model was trained for a different sensor set".into()));
        }
        let out = self.predict_batch(&DMatrix::from_column_slice(v.len(), 1, v))?;
        Ok(DVector::from_vec(derealify(out.as_slice())))
    }

    /// Weak variant only: the operator output evaluated at arbitrary points.
    pub fn evaluate_at(&self, v: &[T], points: &[[T; 2]]) -> Result<Vec<Cplx<T>>> {
        let Trunk::Network(net) = &self.trunk else {
            return Err(Error::InvalidParameter("pointwise evaluation needs a trunk network".into()));
        };
        let m = self.sensors();
        if v.len() != m {
            return Err(Error::Dimension(format!("model expects {m} sensor values, got {}", v.len())));
        }
        let x = self.normalization.inputs(&DMatrix::from_column_slice(m, 1, v));
        let coef = self.branch.forward(&x)?;
        let pts = DMatrix::from_fn(2, points.len(), |i, j| points[j][i]);
        let t = net.forward(&pts)?;
        let s = self.normalization.output_scale;
        Ok((0..points.len())
            .map(|j| {
                let re = t.column(j).rows(0, m).dot(&coef.column(0).rows(0, m));
                let im = t.column(j).rows(m, m).dot(&coef.column(0).rows(m, m));
                Cplx::new(re * s, im * s)
            })
            .collect())
    }
}

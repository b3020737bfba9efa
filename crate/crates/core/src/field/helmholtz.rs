use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{BandedLu, CsrMatrix};
use crate::scalar::{Cplx, Real};

use super::assembly::FemSpace;
use super::discrete::DiscreteField;
use super::mesh::Mesh;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BoundaryCondition {
    /// Homogeneous Dirichlet on the whole boundary.
    Dirichlet,
    /// Homogeneous natural condition (no boundary term).
    Neumann,
}

/// Shape parameters of the source perturbation
/// `g(x) = -amplitude * sin(exp(-decay x1) sin(frequency mu x2))`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BiasParams<T> {
    pub amplitude: T,
    pub decay: T,
    pub frequency: T,
}

impl<T: Real> BiasParams<T> {
    /// The reference perturbation of the perfect source model.
    pub fn reference() -> Self {
        Self {
            amplitude: T::lit(0.5),
            decay: T::lit(3.0),
            frequency: T::lit(5.0),
        }
    }

    pub fn eval(&self, mu: T, x1: T, x2: T) -> T {
        -self.amplitude * ((-self.decay * x1).exp() * (self.frequency * mu * x2).sin()).sin()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum SourceModel<T> {
    /// `q = sin(mu x1) sin(mu x2)`: the best-knowledge model with g dropped.
    BiasedZero,
    /// `q = sin(mu x1) sin(mu x2) + g` with the reference perturbation.
    Perfect,
    /// Same shape as the perfect model with arbitrary perturbation parameters.
    Family(BiasParams<T>),
    /// No forcing at all.
    Zero,
}

impl<T: Real> SourceModel<T> {
    /// Evaluates `q(x1, x2)` at wavenumber `mu`.
    pub fn eval(&self, mu: T, x1: T, x2: T) -> T {
        let base = || (mu * x1).sin() * (mu * x2).sin();
        match self {
            SourceModel::BiasedZero => base(),
            SourceModel::Perfect => base() + BiasParams::reference().eval(mu, x1, x2),
            SourceModel::Family(p) => base() + p.eval(mu, x1, x2),
            SourceModel::Zero => T::zero(),
        }
    }
}

/// Problem `-(1 + i eps mu) Lap u - mu^2 u = mu q` on the unit square.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HelmholtzConfig<T> {
    pub mu: T,
    pub epsilon: T,
    pub bc: BoundaryCondition,
    pub source: SourceModel<T>,
}

impl<T: Real> HelmholtzConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.mu > T::zero()) || !self.mu.is_finite() {
            return Err(Error::InvalidParameter(format!("mu must be positive, got {}", self.mu)));
        }
        if !(self.epsilon >= T::zero()) || !self.epsilon.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "epsilon must be nonnegative, got {}",
                self.epsilon
            )));
        }
        Ok(())
    }
}

/// Factored Helmholtz operator for one `(mu, epsilon, bc)`; reusable across sources.
#[derive(Clone, Debug)]
pub struct HelmholtzSolver<'a, T: Real> {
    space: &'a FemSpace<T>,
    mu: T,
    bc: BoundaryCondition,
    system: CsrMatrix<Cplx<T>>,
    lu: BandedLu<Cplx<T>>,
}

impl<'a, T: Real> HelmholtzSolver<'a, T> {
    pub fn new(space: &'a FemSpace<T>, mu: T, epsilon: T, bc: BoundaryCondition) -> Result<Self> {
        HelmholtzConfig {
            mu,
            epsilon,
            bc,
            source: SourceModel::Zero,
        }
        .validate()?;
        let mesh = space.mesh();
        let n = mesh.node_count();
        let coef = Cplx::new(T::one(), epsilon * mu);
        let mu2 = mu * mu;
        let mut t = Vec::with_capacity(space.stiffness().nnz() * 2);
        for i in 0..n {
            t.extend(space.stiffness().row(i).map(|(j, v)| (i, j, coef * v)));
            t.extend(space.mass().row(i).map(|(j, v)| (i, j, Cplx::new(-mu2 * v, T::zero()))));
        }
        let mut system = CsrMatrix::from_triplets(n, n, t);
        if bc == BoundaryCondition::Dirichlet {
            let constrained: Vec<bool> = (0..n).map(|k| mesh.is_boundary(k)).collect();
            system.constrain_identity(&constrained);
        }
        let lu = BandedLu::factor(&system)?;
        let condition = lu.pivot_condition();
        let limit = T::one() / (T::machine_eps() * T::lit(1e3));
        if !(condition < limit) {
            return Err(Error::Resonance {
                mu: mu.as_f64(),
                condition: condition.as_f64(),
            });
        }
        Ok(Self {
            space,
            mu,
            bc,
            system,
            lu,
        })
    }

    pub fn from_config(space: &'a FemSpace<T>, cfg: &HelmholtzConfig<T>) -> Result<Self> {
        cfg.validate()?;
        Self::new(space, cfg.mu, cfg.epsilon, cfg.bc)
    }

    /// Assembled (and constrained) system matrix.
    pub fn system(&self) -> &CsrMatrix<Cplx<T>> {
        &self.system
    }

    /// Right-hand side `mu * int q phi_i` of the given source, constrained.
    pub fn rhs(&self, source: &SourceModel<T>) -> Vec<Cplx<T>> {
        let mu = self.mu;
        let load = self
            .space
            .load_vector(|x, y| Cplx::new(mu * source.eval(mu, x, y), T::zero()));
        self.constrain(load)
    }

    fn constrain(&self, mut load: Vec<Cplx<T>>) -> Vec<Cplx<T>> {
        if self.bc == BoundaryCondition::Dirichlet {
            for &k in self.space.mesh().boundary_nodes() {
                load[k] = Cplx::new(T::zero(), T::zero());
            }
        }
        load
    }

    pub fn solve(&self, source: &SourceModel<T>) -> Result<DiscreteField<T>> {
        self.solve_load(self.rhs(source))
    }

    /// Solves with an arbitrary load vector `int f phi_i` (boundary rows are zeroed
    /// under Dirichlet conditions).
    pub fn solve_load(&self, load: Vec<Cplx<T>>) -> Result<DiscreteField<T>> {
        let rhs = self.constrain(load);
        let u = self.lu.solve(&rhs);
        let field = DiscreteField::new(self.space.mesh(), u)?;
        if !field.is_finite() {
            return Err(Error::Resonance {
                mu: self.mu.as_f64(),
                condition: f64::INFINITY,
            });
        }
        Ok(field)
    }
}

/// Assembles and solves the Helmholtz problem on `mesh`.
pub fn solve_helmholtz<T: Real>(mesh: &Mesh<T>, cfg: &HelmholtzConfig<T>) -> Result<DiscreteField<T>> {
    let space = FemSpace::new(mesh.clone());
    HelmholtzSolver::from_config(&space, cfg)?.solve(&cfg.source)
}

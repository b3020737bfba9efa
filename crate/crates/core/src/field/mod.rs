//! Structured P1 finite elements on the unit square: mesh, nodal fields,
//! Gram matrices of the state inner product, and the dissipative Helmholtz
//! solve used both for ground truth and for the background manifold.

mod assembly;
mod discrete;
mod helmholtz;
pub mod io;
mod mesh;
pub mod quadrature;

pub use assembly::{FemSpace, InnerProduct, InnerProductKind};
pub use discrete::DiscreteField;
pub use helmholtz::{
    solve_helmholtz, BiasParams, BoundaryCondition, HelmholtzConfig, HelmholtzSolver, SourceModel,
};
pub use mesh::{Mesh, MeshId};

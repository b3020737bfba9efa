//! Reconstruction of partially known physical states from a reduced physics
//! background and sparse Gaussian measurements.
//!
//! The crate covers the full pipeline: P1 finite elements for a dissipative
//! Helmholtz model ([`field`]), observation functionals and their Riesz
//! representers ([`observation`]), POD backgrounds ([`reduced_basis`]),
//! PBDW solves with stability and GCV diagnostics ([`assimilation`]),
//! greedy sensor placement ([`placement`]) and DeepONet-style update
//! predictors trained from classical solves ([`neural`]).
//!
//! Every numerical type is generic over [`Real`] (`f32` or `f64`); the
//! aliases at the crate root fix the precision.

pub mod assimilation;
pub mod error;
pub mod field;
pub mod linalg;
pub mod neural;
pub mod observation;
pub mod placement;
pub mod reduced_basis;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::{Cplx, Real};

pub type Mesh64 = field::Mesh<f64>;
pub type Field64 = field::DiscreteField<f64>;
pub type FemSpace64 = field::FemSpace<f64>;
pub type InnerProduct64 = field::InnerProduct<f64>;

pub type Mesh32 = field::Mesh<f32>;
pub type Field32 = field::DiscreteField<f32>;
pub type FemSpace32 = field::FemSpace<f32>;
pub type InnerProduct32 = field::InnerProduct<f32>;

//! Sparse storage, banded direct solvers and instrumented dense factorizations.

pub mod banded;
pub mod cost;
pub mod csr;
pub mod dense;

pub use banded::{BandedCholesky, BandedLu};
pub use cost::{FactorKind, Factorization};
pub use csr::CsrMatrix;

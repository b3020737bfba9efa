use thiserror::Error;

/// Failures raised by the numerical core.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid mesh size {nx}x{ny}: each axis needs at least 2 nodes")]
    MeshSize { nx: usize, ny: usize },

    #[error("point ({x1}, {x2}) lies outside the unit square")]
    OutsideDomain { x1: f64, x2: f64 },

    #[error("Helmholtz system is singular at mu = {mu} (pivot condition estimate {condition:e}); a resonance of the discrete operator")]
    Resonance { mu: f64, condition: f64 },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is not positive definite: {0}")]
    NotPositiveDefinite(String),

    #[error("unobservable background: {deficient} of {columns} columns of B are numerically rank deficient")]
    Unobservable { deficient: usize, columns: usize },

    #[error("saddle-point system is singular")]
    SingularSystem,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("placed only {placed} of {requested} sensors with minimum distance {min_dist} after {attempts} attempts")]
    PlacementInfeasible {
        placed: usize,
        requested: usize,
        min_dist: f64,
        attempts: usize,
    },

    #[error("candidate grid is empty")]
    EmptyGrid,

    #[error("sensor direction {index} lies fully inside the background space")]
    DegenerateTrunk { index: usize },

    #[error("non-finite training loss at epoch {epoch}")]
    NonFiniteLoss { epoch: usize },

    #[error("GCV score is undefined for every value of the grid")]
    GcvUndefined,

    #[error("a-priori bound not applicable: {0}")]
    BoundNotApplicable(String),

    #[error("checkpoint: {0}")]
    Checkpoint(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

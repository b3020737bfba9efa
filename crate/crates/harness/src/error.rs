use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("cannot write {path}: {source}")]
    Output {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Core(#[from] pbdw::Error),
}

pub type Result<T, E = HarnessError> = std::result::Result<T, E>;

impl HarnessError {
    /// 3 for failures of the numerics, 2 for everything the user can fix in
    /// the configuration or the environment.
    pub fn exit_code(&self) -> i32 {
        use pbdw::Error as E;
        match self {
            HarnessError::Core(
                E::Resonance { .. }
                | E::NotPositiveDefinite(_)
                | E::Unobservable { .. }
                | E::SingularSystem
                | E::DegenerateTrunk { .. }
                | E::NonFiniteLoss { .. }
                | E::GcvUndefined
                | E::PlacementInfeasible { .. },
            ) => 3,
            _ => 2,
        }
    }
}

pub(crate) fn config_err(msg: impl Into<String>) -> HarnessError {
    HarnessError::Config(msg.into())
}

use std::path::PathBuf;

use thiserror::Error;

/// Process exit status for a successful run.
pub const EXIT_OK: i32 = 0;
/// Output could not be written.
pub const EXIT_IO: i32 = 1;
/// The configuration (file, overrides or the model it describes) is invalid.
pub const EXIT_CONFIG: i32 = 2;
/// A numerical routine failed or exceeded its capacity.
pub const EXIT_SOLVER: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] dilute_core::Error),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        Self::Config(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        use dilute_core::Error as E;
        match self {
            Self::Config(_) => EXIT_CONFIG,
            Self::Io { .. } => EXIT_IO,
            Self::Core(e) => match e {
                E::SolverFailure { .. } | E::IntegrationFailure { .. } | E::CapacityExceeded { .. } | E::InsufficientData(_) => EXIT_SOLVER,
                E::InvalidArgument(_)
                | E::DimensionMismatch { .. }
                | E::UnsupportedModel(_)
                | E::InvalidTarget(_)
                | E::IncompatibleJumps(_)
                | E::InvalidData(_) => EXIT_CONFIG,
            },
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

use std::path::PathBuf;

use thiserror::Error;

/// Exit status for malformed specs and parameter violations.
pub const EXIT_SPEC: i32 = 2;
/// Exit status when a solver fails.
pub const EXIT_SOLVER: i32 = 3;
/// Exit status for unknown subcommands and bad flags.
pub const EXIT_USAGE: i32 = 64;
/// Exit status when an output cannot be written.
pub const EXIT_IO: i32 = 74;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Spec(String),

    #[error(transparent)]
    Core(#[from] flexbeam_core::Error),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        use flexbeam_core::Error as E;
        match self {
            CliError::Spec(_) => EXIT_SPEC,
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Io { .. } => EXIT_IO,
            CliError::Core(e) => match e {
                E::SingularSystem { .. } | E::MaxIterations { .. } | E::EigenFailure(_) => EXIT_SOLVER,
                _ => EXIT_SPEC,
            },
        }
    }
}

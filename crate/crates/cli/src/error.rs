use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}:{line}: {message}")]
    Parse { path: String, line: usize, message: String },
    #[error(transparent)]
    Core(#[from] torus_wigner::Error),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("check failed: {0}")]
    CheckFailed(String),
}

impl CliError {
    /// 0 success, 1 usage or input error, 2 computation error, 3 I/O error.
    pub fn exit_code(&self) -> i32 {
        use torus_wigner::Error as E;
        match self {
            Self::Usage(_) | Self::Parse { .. } => 1,
            Self::Core(E::InvalidArgument(_) | E::DimensionMismatch { .. } | E::OutOfRange(_)) => 1,
            Self::Core(_) | Self::CheckFailed(_) => 2,
            Self::Io { .. } => 3,
        }
    }

    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

use std::io;
use std::path::{Path, PathBuf};

/// Process exit status of the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Success = 0,
    Usage = 1,
    Data = 2,
    Degenerate = 3,
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    Data { path: PathBuf, source: kgsens_core::Error },
    #[error(transparent)]
    Core(#[from] kgsens_core::Error),
    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
    #[error("{0}")]
    Usage(String),
    #[error("dataset `{dataset}` has {found} completed trials, {needed} are needed ({short} short)", short = needed - found)]
    InsufficientTrials { dataset: String, found: usize, needed: usize },
}

impl Error {
    pub fn io(path: &Path, source: io::Error) -> Self {
        Error::Io { path: path.to_path_buf(), source }
    }

    pub fn format(path: &Path, message: impl ToString) -> Self {
        Error::Format { path: path.to_path_buf(), message: message.to_string() }
    }

    pub fn exit_status(&self) -> ExitStatus {
        use kgsens_core::Error as C;
        match self {
            Error::Usage(_) => ExitStatus::Usage,
            Error::Core(C::DegenerateModel | C::ZeroVariance) | Error::Data { source: C::DegenerateModel | C::ZeroVariance, .. } => {
                ExitStatus::Degenerate
            }
            Error::Core(C::InvalidArgument(_)) => ExitStatus::Usage,
            _ => ExitStatus::Data,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

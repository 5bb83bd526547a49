use std::path::PathBuf;

use qresource::photonics::PhotonicsError;
use qresource::pipeline::PipelineError;
use qresource::tomography::TomographyError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    /// 2 for bad input, 3 for numerical failures, 1 for I/O.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io { .. } => 1,
        }
    }

    pub fn usage(msg: impl std::fmt::Display) -> Self {
        CliError::Usage(msg.to_string())
    }

    pub fn numerical(msg: impl std::fmt::Display) -> Self {
        CliError::Numerical(msg.to_string())
    }
}

impl From<PhotonicsError> for CliError {
    fn from(e: PhotonicsError) -> Self {
        match e {
            PhotonicsError::BadXi(_)
            | PhotonicsError::BadElement(_)
            | PhotonicsError::NoPpbs
            | PhotonicsError::OutOfRange(_) => CliError::usage(e),
            _ => CliError::numerical(e),
        }
    }
}

impl From<TomographyError> for CliError {
    fn from(e: TomographyError) -> Self {
        match e {
            TomographyError::Parse(_) | TomographyError::Incomplete(_) | TomographyError::EmptyDataset => {
                CliError::usage(e)
            }
            _ => CliError::numerical(e),
        }
    }
}

impl From<PipelineError> for CliError {
    fn from(e: PipelineError) -> Self {
        match e {
            PipelineError::Photonics(p) => p.into(),
            PipelineError::Tomography(t) => t.into(),
            other => CliError::numerical(other),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

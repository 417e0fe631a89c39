use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] qpca_core::Error),
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {}: {source}", path.display())]
    Input { path: PathBuf, source: std::io::Error },
    #[error("cannot write {}: {source}", path.display())]
    Output { path: PathBuf, source: std::io::Error },
}

impl CliError {
    /// 2 for bad input, 3 for the dimension cap, 4 for a broken internal
    /// invariant, 1 when results could not be written.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(qpca_core::Error::DimensionLimit { .. }) => 3,
            CliError::Core(qpca_core::Error::Invariant(_)) => 4,
            CliError::Output { .. } => 1,
            _ => 2,
        }
    }
}

pub fn missing(flag: &str) -> CliError {
    CliError::Usage(format!("missing required setting --{flag}"))
}

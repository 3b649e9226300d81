use std::path::PathBuf;

use cbf_core::CbfError;

/// Failures mapped onto the exit-status contract.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("I/O error on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0} check(s) failed")]
    ChecksFailed(usize),
    #[error(transparent)]
    Core(#[from] CbfError),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> CliError {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }

    /// 1 = check failure, 2 = usage or configuration, 3 = numerical blow-up.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::ChecksFailed(_) => 1,
            CliError::Core(CbfError::BlowUp { .. }) => 3,
            _ => 2,
        }
    }
}

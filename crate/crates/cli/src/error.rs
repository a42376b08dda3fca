use thiserror::Error;

/// CLI failure, mapped onto the process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Runtime(String),
    #[error("{0}")]
    Verification(String),
}

impl CliError {
    /// 1 usage, 2 runtime or I/O, 3 verification failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Runtime(_) => 2,
            CliError::Verification(_) => 3,
        }
    }
}

impl From<acca_core::Error> for CliError {
    fn from(e: acca_core::Error) -> Self {
        match e {
            acca_core::Error::Usage(_) | acca_core::Error::Domain(_) => CliError::Usage(e.to_string()),
            acca_core::Error::Numeric(_) => CliError::Runtime(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

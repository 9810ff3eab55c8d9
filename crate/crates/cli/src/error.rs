use infoflow_core::Error;

/// Failures grouped by exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad flags, config or parameter values: exit 1.
    #[error("{0}")]
    Usage(String),
    /// Unreadable or invalid input data, or unwritable output: exit 2.
    #[error("{0}")]
    Data(String),
    /// A hard verification check failed: exit 3.
    #[error("{0}")]
    Verification(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Verification(_) => 3,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter(_)
            | Error::NTooLarge(_)
            | Error::SelfPair(_)
            | Error::IndexOutOfRange(_)
            | Error::SystemTooLarge(_) => CliError::Usage(e.to_string()),
            _ => CliError::Data(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

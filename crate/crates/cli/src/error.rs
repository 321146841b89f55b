use thiserror::Error;

/// Failure of a command, carrying the process exit status it maps to.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, unsupported combinations, mismatched inputs.
    #[error("{0}")]
    Usage(String),

    #[error("{0}")]
    Io(String),

    /// Training or sampling produced non-finite values, or an internal
    /// invariant failed.
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io(_) => 3,
            CliError::Numerical(_) => 4,
        }
    }
}

impl From<bfvae::Error> for CliError {
    fn from(e: bfvae::Error) -> Self {
        use bfvae::Error as E;
        let msg = e.to_string();
        match e {
            E::Io(_) | E::Format(_) => CliError::Io(msg),
            E::NonFinite(_) => CliError::Numerical(msg),
            _ => CliError::Usage(msg),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

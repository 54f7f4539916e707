use tadic_core::Error;

/// Failure classes, each with its own exit status.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("resource limit: {0}")]
    Resource(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Resource(_) => 3,
            CliError::Internal(_) => 1,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::NotPrime(_)
            | Error::InvalidProfile(_)
            | Error::InvalidTower(_)
            | Error::GeometryMismatch(_)
            | Error::ReducibleModulus(_) => CliError::Usage(msg),
            Error::WorkingPrecisionTooLarge { .. } | Error::EnumerationBudget { .. } | Error::PrecisionExhausted(_) => {
                CliError::Resource(msg)
            }
            Error::Domain(_) | Error::Slopes(_) | Error::Internal(_) => CliError::Internal(msg),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Resource(e.to_string())
    }
}

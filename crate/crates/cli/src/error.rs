use thiserror::Error;

/// Failure of a CLI command, mapped onto the process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad configuration, arguments or input data (exit 2).
    #[error("invalid input: {0}")]
    Validation(String),
    /// A solver ran out of iterations (exit 3).
    #[error("solver did not converge: {0}")]
    NotConverged(String),
    /// Non-finite or degenerate numerics, or an I/O failure while writing (exit 4).
    #[error("numeric failure: {0}")]
    Numeric(String),
    /// `verify` ran and at least one check exceeded its tolerance (exit 1).
    #[error("verification failed: {0}")]
    VerifyFailed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::VerifyFailed(_) => 1,
            CliError::Validation(_) => 2,
            CliError::NotConverged(_) => 3,
            CliError::Numeric(_) => 4,
        }
    }
}

impl From<gamcal::Error> for CliError {
    fn from(e: gamcal::Error) -> Self {
        use gamcal::Error as E;
        match e {
            E::NotConverged { .. } => CliError::NotConverged(e.to_string()),
            E::NonFinite(_)
            | E::NonFiniteState { .. }
            | E::Singular(_)
            | E::DegenerateTangent(_)
            | E::DegenerateSimplex(_)
            | E::NotInvertibleBlade => CliError::Numeric(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

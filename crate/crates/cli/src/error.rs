use juliadim::Error;

/// Process exit codes.
pub const EXIT_SCHEMA: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_CHECK: i32 = 4;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Schema(String),
    #[error("numerical failure: {0}")]
    Numerical(Error),
    #[error("check failed: {0}")]
    Check(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Schema(_) => EXIT_SCHEMA,
            CliError::Numerical(_) => EXIT_NUMERICAL,
            CliError::Check(_) => EXIT_CHECK,
            CliError::Io(_) => 1,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Schema(_) => "schema",
            CliError::Numerical(_) => "numerical",
            CliError::Check(_) => "check",
            CliError::Io(_) => "io",
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::NonConvergence { .. }
            | Error::NoBracket(_)
            | Error::Inconclusive
            | Error::SeriesNotDecaying { .. }
            | Error::AllCandidatesRejected { .. }
            | Error::NoRepellingFixedPoint
            | Error::BudgetExceeded { .. }
            | Error::PoleDerivative
            | Error::EmptyCloud => CliError::Numerical(e),
            Error::Io(m) => CliError::Io(m),
            other => CliError::Schema(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

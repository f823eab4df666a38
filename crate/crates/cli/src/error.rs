use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("solver aborted: {0}")]
    Solver(String),
    #[error("check failed: {0}")]
    Check(String),
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("i/o error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl CliError {
    /// Process exit status: 1 for failed checks, 2 for bad input, 3 for solver aborts.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Check(_) => 1,
            CliError::Config(_) | CliError::Hypothesis(_) | CliError::Io { .. } => 2,
            CliError::Solver(_) => 3,
        }
    }
}

impl From<crd_core::Error> for CliError {
    fn from(e: crd_core::Error) -> Self {
        match e {
            crd_core::Error::Hypothesis(m) => CliError::Hypothesis(m),
            crd_core::Error::Positivity { .. } | crd_core::Error::BoundaryTouch { .. } => {
                CliError::Solver(e.to_string())
            }
            other => CliError::Config(other.to_string()),
        }
    }
}

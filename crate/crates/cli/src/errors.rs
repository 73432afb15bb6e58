//! CLI error taxonomy mapped onto process exit codes.

use std::fmt;

/// Exit code 2: bad flags or an inconsistent configuration.
/// Exit code 3: input data problems (missing file, bad cells, bad columns).
/// Exit code 4: the pipeline could not produce a numerically valid result.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Data(_) => 3,
            CliError::Numerical(_) => 4,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Data(_) => "data",
            CliError::Numerical(_) => "numerical",
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Data(m) | CliError::Numerical(m) => m,
        }
    }

    /// Machine-readable form printed to stderr on failure.
    pub fn to_json(&self) -> String {
        serde_json::json!({
            "error": { "kind": self.kind(), "message": self.message() }
        })
        .to_string()
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind(), self.message())
    }
}

impl std::error::Error for CliError {}

impl From<drmat::Error> for CliError {
    fn from(e: drmat::Error) -> Self {
        match e {
            drmat::Error::InvalidArgument(_) | drmat::Error::DimensionMismatch { .. } => {
                CliError::Usage(e.to_string())
            }
            drmat::Error::IllConditionedCovariance { .. }
            | drmat::Error::NotPositiveDefinite
            | drmat::Error::DegenerateData(_)
            | drmat::Error::NonPositiveVariance { .. } => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

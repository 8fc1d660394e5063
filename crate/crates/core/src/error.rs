use thiserror::Error;

/// Errors raised by the solvers, the normal-form engine and the experiment driver.
#[derive(Debug, Error)]
pub enum Error {
    #[error("Newton iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("linear solve failed: Jacobian is singular or numerically degenerate ({0})")]
    SingularJacobian(String),

    #[error("invalid frequency: 1 - eps*Omega = {value} must be positive")]
    InvalidFrequency { value: f64 },

    #[error("eigen-solver failure: {0}")]
    EigenSolverFailure(String),

    #[error("problem dimension {size} exceeds the configured cap {cap}")]
    DimensionOverflow { size: usize, cap: usize },

    #[error("monomial degree {degree} exceeds the configured cap {cap}")]
    DegreeOverflow { degree: usize, cap: usize },

    #[error("normal form recursion exceeded the term cap ({terms} > {cap})")]
    OrderOverflow { terms: usize, cap: usize },

    #[error("ambiguous eigenvalue match: {0}")]
    MatchAmbiguity(String),

    #[error("invalid configuration: {}", .0.join("; "))]
    ConfigInvalid(Vec<String>),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error("config parse error: {0}")]
    Toml(#[from] toml::de::Error),
}

impl Error {
    /// Process exit code used by the command line driver.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::ConfigInvalid(_) | Error::Toml(_) => 2,
            Error::NonConvergence { .. }
            | Error::SingularJacobian(_)
            | Error::EigenSolverFailure(_)
            | Error::MatchAmbiguity(_)
            | Error::InvalidFrequency { .. } => 3,
            Error::DimensionOverflow { .. } | Error::DegreeOverflow { .. } | Error::OrderOverflow { .. } => 4,
            _ => 1,
        }
    }

    /// Short machine-readable tag for error records.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NonConvergence { .. } => "NonConvergence",
            Error::SingularJacobian(_) => "SingularJacobian",
            Error::InvalidFrequency { .. } => "InvalidFrequency",
            Error::EigenSolverFailure(_) => "EigenSolverFailure",
            Error::DimensionOverflow { .. } => "DimensionOverflow",
            Error::DegreeOverflow { .. } => "DegreeOverflow",
            Error::OrderOverflow { .. } => "OrderOverflow",
            Error::MatchAmbiguity(_) => "MatchAmbiguity",
            Error::ConfigInvalid(_) => "ConfigInvalid",
            Error::InvalidInput(_) => "InvalidInput",
            Error::Io(_) => "Io",
            Error::Json(_) => "Json",
            Error::Csv(_) => "Csv",
            Error::Toml(_) => "ConfigParse",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

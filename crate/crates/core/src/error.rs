use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("conditioning event has zero probability: {0}")]
    ZeroConditioningEvent(String),
    #[error("positivity violation in {what}: {value:e}")]
    PositivityViolation { what: String, value: f64 },
    #[error("nuisance component `{0}` is required but absent")]
    MissingNuisance(String),
    #[error("design matrix is rank deficient: {0}")]
    RankDeficient(String),
    #[error("logistic fit diverged (separation): {0}")]
    SeparationDetected(String),
    #[error("no convergence after {iters} iterations (gradient norm {grad:e})")]
    MaxIterExceeded { iters: usize, grad: f64 },
    #[error("quadrature did not stabilise: {0}")]
    QuadratureNonConvergence(String),
    #[error("assumption violated: {0}")]
    AssumptionViolation(String),
    #[error("argument out of domain: {0}")]
    DomainError(String),
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("invalid dataset: {0}")]
    InvalidData(String),
    #[error("invalid model specification: {0}")]
    InvalidSpec(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("io: {0}")]
    Io(String),
}

impl Error {
    pub fn positivity(what: impl Into<String>, value: f64) -> Self {
        Error::PositivityViolation {
            what: what.into(),
            value,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

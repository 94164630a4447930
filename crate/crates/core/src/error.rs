use thiserror::Error;

/// Errors produced by the fading toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("kappa = {kappa} is below the minimum {min} supported by the signed mixture (m < mu)")]
    KappaTooSmall { kappa: f64, min: f64 },
    #[error("argument must be nonnegative, got {0}")]
    NegativeInput(f64),
    #[error("argument must be strictly positive, got {0}")]
    NonPositiveInput(f64),
    #[error("s = {s} is outside the region of convergence (s < {limit})")]
    OutOfRegion { s: f64, limit: f64 },
    #[error("{what} did not converge within {terms} terms")]
    NoConvergence { what: &'static str, terms: usize },
    #[error("quadrature failed: {0}")]
    QuadratureFailure(String),
    #[error("internal consistency check failed: {0}")]
    InternalConsistency(String),
    #[error("operation requires m >= mu (proper mixture), got mu = {mu}, m = {m}")]
    RegimeMismatch { mu: u32, m: u32 },
    #[error("metric evaluation failed: {0}")]
    MetricEvaluationFailure(String),
    #[error("parse error at line {line}: {message}")]
    ParseError { line: u64, message: String },
    #[error("need at least {min} samples, got {n}")]
    TooFewSamples { n: usize, min: usize },
    #[error("sample is degenerate (all values identical)")]
    DegenerateSample,
    #[error("no fit candidate could be evaluated")]
    NoFeasibleCandidate,
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

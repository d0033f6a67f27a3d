use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("feature under-resolved: {0}")]
    UnderResolved(String),

    #[error("domain is disconnected ({components} components)")]
    Disconnected { components: usize },

    #[error("undefined quotient: field is identically zero")]
    UndefinedQuotient,

    #[error("exponent p = {0} outside the supported range [1.1, 16]")]
    ExponentOutOfRange(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("domain too small: {0}")]
    DomainTooSmall(String),

    #[error("bisection failed: {0}")]
    Bracket(String),

    #[error("covering exceeded the subset budget: {used} > {budget}")]
    CoveringBudget { used: usize, budget: usize },

    #[error("lemma hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("degenerate ball: {0}")]
    DegenerateBall(String),

    #[error("capacity degenerate: {0}")]
    CapacityDegenerate(String),

    #[error("not converged: {0}")]
    NotConverged(String),

    #[error("trend undecidable: {0}")]
    TrendUndecidable(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("zero denominator: {0}")]
    ZeroDenominator(String),
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("series does not terminate within {bound} steps")]
    NotTerminating { bound: usize },
    #[error("no convergence after {terms} terms")]
    NoConvergence { terms: usize },
    #[error("unbound symbol `{0}`")]
    UnboundSymbol(String),
    #[error("shift {0} is not in the relation table")]
    NotInTable(String),
    #[error("no relation found with x-degree up to {budget}")]
    BudgetExceeded { budget: usize },
    #[error("relation verification failed: {0}")]
    VerificationFailed(String),
    #[error("generator action undefined: {0}")]
    UndefinedAction(String),
    #[error("no canonical representative found for {0}")]
    NoRepresentativeFound(String),
    #[error("degenerate family: {0}")]
    DegenerateFamily(String),
    #[error("sampling exhausted after {attempts} attempts")]
    SamplingExhausted { attempts: usize },
    #[error("degenerate parameter: {0}")]
    DegenerateParameter(String),
    #[error("constraint violated: {0}")]
    ConstraintViolated(String),
    #[error("unknown identity `{0}`")]
    UnknownIdentity(String),
    #[error("parse error: {0}")]
    Parse(String),
}

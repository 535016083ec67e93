use thiserror::Error;

/// Failures raised by the calculus. Report-valued checks (scheme validation,
/// class comparisons) never use this type; it is reserved for inputs that
/// break an operation's preconditions.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("not a unit in truncated ring: {0}")]
    NotUnit(String),
    #[error("multiplicity mismatch: {0} vs {1}")]
    Multiplicity(usize, usize),
    #[error("invalid automorphism: {0}")]
    InvalidAuto(String),
    #[error("cover too small: {0}")]
    CoverTooSmall(String),
    #[error("cochain mismatch: {0}")]
    Mismatch(String),
    #[error("not a cocycle: {0}")]
    NotCocycle(String),
    #[error("cocycle violation on overlap {overlap}: {detail}")]
    CocycleViolation { overlap: String, detail: String },
    #[error("section not regular on chart {chart}: {detail}")]
    NotRegular { chart: usize, detail: String },
    #[error("out of range: {0}")]
    Range(String),
    #[error("no coboundary witness exists: {0}")]
    NoWitness(String),
    #[error("malformed input: {0}")]
    Parse(String),
    #[error("inconsistent profile: {0}")]
    Profile(String),
    #[error("internal: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

/// Errors raised anywhere in the laboratory.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("composition is not associative: ({0}{1}){2} != {0}({1}{2})")]
    NonAssociative(String, String, String),
    #[error("element {0} does not belong to the carrier")]
    NotInCarrier(String),
    #[error("window contains {0} twice")]
    DuplicateWindow(String),
    #[error("operation needs a finite carrier")]
    NotFinite,
    #[error("domain is not closed under composition: {0}*{1} leaves it")]
    DomainNotClosed(String, String),
    #[error("function undefined at {0}")]
    Undefined(String),
    #[error("function cannot be evaluated on this carrier: {0}")]
    Incompatible(String),
    #[error("constraint {name} violated (magnitude {magnitude:e})")]
    Constraint { name: String, magnitude: f64 },
    #[error("degenerate parameters: {0}")]
    Degenerate(String),
    #[error("carrier cannot host the family: {0}")]
    CannotHost(String),
    #[error("sampling failed after {attempts} attempts; last failure: {reason}")]
    Sampling { attempts: usize, reason: String },
    #[error("missing parameter {0}")]
    MissingParam(String),
    #[error("unknown family id {0}")]
    UnknownFamily(String),
    #[error("unidentifiable: {0}")]
    Unidentifiable(String),
    #[error("not a solution: relative residual {0:e}")]
    NotASolution(f64),
    #[error("independence hypothesis violated: {0}")]
    Hypothesis(String),
}

pub type Result<T> = std::result::Result<T, Error>;

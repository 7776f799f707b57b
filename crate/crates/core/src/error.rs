use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("malformed sequence: {0}")]
    MalformedSequence(String),

    #[error("invalid kneading invariant: {0}")]
    InvalidInvariant(String),

    #[error("parameters outside the triangle: beta={beta}, alpha={alpha}")]
    ParamDomain { beta: f64, alpha: f64 },

    #[error("orbit passes too close to the critical point at iterate {index}")]
    AmbiguousItinerary { index: usize },

    #[error("not renormalizable by ({wplus}, {wminus})")]
    NotRenormalizable { wplus: String, wminus: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("no root of the kneading series in (0, 1)")]
    NoRoot,

    #[error("not uniformly linearizable: renormalization step {step} is not periodic")]
    NotUniformlyLinearizable { step: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),
}

use thiserror::Error;

/// Errors raised while building constellations, mappings or running searches.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("unsupported PAM order {0}; only 4 and 8 are supported")]
    InvalidOrder(usize),

    #[error("invalid interval: lower bound {lo} exceeds upper bound {hi}")]
    InvalidInterval { lo: f64, hi: f64 },

    #[error("noise standard deviation must be positive and finite, got {0}")]
    InvalidSigma(f64),

    #[error("denoise ambiguity at superposed level {level}: pairs map to network codes {first} and {second}")]
    Ambiguity { level: i64, first: usize, second: usize },

    #[error("relay (broadcast) constellation must be uniform PAM")]
    InvalidRelayConstellation,

    #[error("invalid bit labels: {0}")]
    InvalidLabels(String),

    #[error("invalid symbol mapping: {0}")]
    InvalidMapping(String),

    #[error("order mismatch: expected {expected}, got {got}")]
    OrderMismatch { expected: usize, got: usize },

    #[error(
        "equivalence orbit of {representative:?} is inconsistent: member {member:?} has objective {member_value} vs {class_value}"
    )]
    OrbitInconsistency {
        representative: Vec<usize>,
        member: Vec<usize>,
        class_value: f64,
        member_value: f64,
    },

    #[error("objective difference has no sign change on [{lo}, {hi}] dB")]
    NoSignChange { lo: f64, hi: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;

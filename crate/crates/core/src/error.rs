use thiserror::Error;

/// Errors surfaced by the core pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unreadable log header: {0}")]
    Header(String),

    #[error("unknown phone id `{0}` (no screen spec)")]
    UnknownPhone(String),

    #[error("screen spec for `{spec}` does not match stroke phone `{stroke}`")]
    PhoneMismatch { spec: String, stroke: String },

    #[error("invalid screen spec: {0}")]
    InvalidScreen(String),

    #[error("degenerate stroke: {0}")]
    DegenerateStroke(&'static str),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unknown feature name `{0}`")]
    UnknownFeature(String),

    #[error("need at least two distinct users, got {0}")]
    TooFewUsers(usize),

    #[error("need both genuine and impostor decisions")]
    OneClass,

    #[error("SVM solver did not converge for C={c}, gamma={gamma} within {iterations} iterations")]
    NoConvergence {
        c: f64,
        gamma: f64,
        iterations: usize,
    },

    #[error("too few samples: {0}")]
    TooFewSamples(String),

    #[error("cannot map synthetic value into the valid range of `{0}`")]
    InfeasibleRange(String),

    #[error("model format version {found} is not supported (expected {expected})")]
    ModelVersion { found: u32, expected: u32 },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

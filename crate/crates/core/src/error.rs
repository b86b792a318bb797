use thiserror::Error;

/// Errors produced by the solver library.
///
/// Target indices in messages are 1-based to match the file and CLI
/// conventions; the `target` fields themselves are 0-based.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid game: {0}")]
    InvalidGame(String),

    #[error("invalid attacker type {type_index}: {msg}")]
    InvalidType { type_index: usize, msg: String },

    #[error("type set is empty")]
    EmptyTypeSet,

    #[error("invalid coverage: {0}")]
    InvalidCoverage(String),

    #[error("target {} out of range for a game with {n} targets", .target + 1)]
    TargetOutOfRange { target: usize, n: usize },

    #[error("type index {index} out of range for a type set of size {len}")]
    TypeOutOfRange { index: usize, len: usize },

    #[error("maximin strategy is not fully mixed; the zero-sum report is not guaranteed optimal")]
    NotFullyMixed,

    #[error("defender payoff at target {} is negative ({value}); shift the game first", .target + 1)]
    NegativePayoffs { target: usize, value: f64 },

    #[error("SSE value of type {type_index} is {value}, too small for a utility ratio")]
    DegenerateSseValue { type_index: usize, value: f64 },

    #[error("policy entry {type_index}: {msg}")]
    InfeasibleOutcome { type_index: usize, msg: String },

    #[error("policy has {got} entries but the type set has {expected}")]
    PolicyLength { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error("malformed config: {0}")]
    Config(#[from] toml::de::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Whether the error stems from bad user input rather than an
    /// environment or internal failure.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::Io(_) | Error::Csv(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid n-gram range {min}-{max} (expected 1 <= min <= max <= {limit})")]
    InvalidRange {
        min: usize,
        max: usize,
        limit: usize,
    },

    #[error("penalty modifier must be positive and finite, got {0}")]
    InvalidPenaltyModifier(f64),

    #[error("document {0} has no label")]
    MissingLabel(usize),

    #[error("language {0:?} has no usable training text")]
    EmptyLanguage(String),

    #[error("unknown language {0:?}")]
    UnknownLanguage(String),

    #[error("model set contains no languages")]
    NoLanguages,

    #[error("model languages disagree on range or penalty modifier")]
    InconsistentModels,

    #[error("at least one HeLI domain must be enabled")]
    NoHeliDomain,

    #[error("train fraction must lie strictly between 0 and 1, got {0}")]
    InvalidFraction(f64),

    #[error("prediction for document {found} does not line up with gold document {expected}")]
    IdMismatch { expected: usize, found: usize },

    #[error("{predictions} predictions for {gold} gold documents")]
    LengthMismatch { predictions: usize, gold: usize },

    #[error("invalid synthetic corpus spec: {0}")]
    InvalidSynthSpec(String),

    #[error("confidence threshold must not be negative or NaN, got {0}")]
    InvalidThreshold(f64),

    #[error("number of splits must be at least 1")]
    InvalidSplits,

    #[error("invalid model entry {gram:?}: {reason}")]
    InvalidEntry { gram: String, reason: &'static str },
}

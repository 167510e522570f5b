use alloc::string::String;
use core::fmt;

/// Errors for invalid inputs or parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Two row-aligned sequences have different lengths.
    LengthMismatch { left: usize, right: usize },
    /// A row does not match the fitted dimension.
    DimensionMismatch { expected: usize, got: usize },
    /// A rule conditions on a feature index outside `[0, d)`.
    FeatureOutOfRange { feature: usize, d: usize },
    /// A hyperparameter is outside its valid range.
    InvalidParam(String),
    /// An input collection is empty where data is required.
    EmptyInput(&'static str),
    /// A cell holds a NaN or infinite value.
    NonFinite(&'static str),
    /// Sample variance is undefined for fewer than two activations.
    UndefinedVariance { n_activated: usize },
    /// The evaluation target is constant, so normalized error is undefined.
    ConstantTarget,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::LengthMismatch { left, right } => {
                write!(f, "length mismatch: {left} vs {right}")
            }
            Error::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected} features, got {got}")
            }
            Error::FeatureOutOfRange { feature, d } => {
                write!(f, "feature index {feature} out of range for {d} features")
            }
            Error::InvalidParam(msg) => write!(f, "invalid parameter: {msg}"),
            Error::EmptyInput(what) => write!(f, "empty input: {what}"),
            Error::NonFinite(what) => write!(f, "non-finite value in {what}"),
            Error::UndefinedVariance { n_activated } => {
                write!(f, "sample variance undefined for {n_activated} activations")
            }
            Error::ConstantTarget => write!(f, "target is constant; normalized error undefined"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;

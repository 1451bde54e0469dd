use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter is outside the range an operation accepts. `name` is the
    /// parameter as it appears in configs and reports.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("incompatible quadrature scheme: {0}")]
    IncompatibleScheme(String),

    #[error("grid size {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("no usable pairs: all {skipped} sampled pairs had a degenerate denominator")]
    EmptyPairSet { skipped: usize },

    #[error("the input function vanishes identically")]
    ZeroFunction,

    #[error("denominator vanishes: {0}")]
    ZeroDenominator(&'static str),

    #[error("least-squares fit failed: {0}")]
    Fit(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// Short machine-readable tag for error reports.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidParameter { .. } => "invalid_parameter",
            Error::IncompatibleScheme(_) => "incompatible_scheme",
            Error::NotPowerOfTwo(_) => "not_power_of_two",
            Error::EmptyPairSet { .. } => "empty_pair_set",
            Error::ZeroFunction => "zero_function",
            Error::ZeroDenominator(_) => "zero_denominator",
            Error::Fit(_) => "fit_failed",
        }
    }

    /// Name of the violated parameter, when there is one.
    pub fn parameter(&self) -> Option<&'static str> {
        match self {
            Error::InvalidParameter { name, .. } => Some(name),
            _ => None,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

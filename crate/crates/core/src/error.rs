use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("schema violation: {0}")]
    Schema(String),

    #[error("table of {needed} entries exceeds the memory budget of {budget} entries")]
    BudgetExceeded { needed: u128, budget: usize },

    #[error("alphabet of size {size} exceeds the limit of {limit}")]
    AlphabetLimit { size: usize, limit: usize },

    #[error("probabilities sum to {0}, not 1")]
    NotNormalized(f64),

    #[error("negative probability {0}")]
    NegativeProbability(f64),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("protocol restriction violated: {0}")]
    Restriction(String),

    #[error("law is not a product law (KL gap {0})")]
    NotProduct(f64),

    #[error("no transcript value satisfies the conditioned key requirements")]
    NoQualifyingValue,

    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    /// Stable machine-readable tag used in CLI error objects.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidArgument(_) => "invalid_argument",
            Error::Schema(_) => "schema",
            Error::BudgetExceeded { .. } => "budget",
            Error::AlphabetLimit { .. } => "alphabet_limit",
            Error::NotNormalized(_) | Error::NegativeProbability(_) => "schema",
            Error::ShapeMismatch(_) => "shape_mismatch",
            Error::Restriction(_) => "restriction",
            Error::NotProduct(_) => "not_product",
            Error::NoQualifyingValue => "no_qualifying_value",
            Error::Internal(_) => "internal",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}

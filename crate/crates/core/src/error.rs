use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A required hypothesis does not hold; the name identifies which one.
    #[error("precondition refused: {hypothesis} does not hold ({detail})")]
    Hypothesis {
        hypothesis: &'static str,
        detail: String,
    },

    #[error("enumeration budget exceeded: {required} tuples needed, budget is {budget}")]
    BudgetExceeded { required: u128, budget: u128 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid table: {0}")]
    InvalidTable(String),

    #[error("symbol {symbol} out of range for alphabet of size {size}")]
    SymbolOutOfRange { symbol: usize, size: usize },

    #[error("word length {got} does not match block length {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("decoding failed: {0}")]
    Decode(String),
}

impl Error {
    pub fn hypothesis(hypothesis: &'static str, detail: impl Into<String>) -> Self {
        Error::Hypothesis {
            hypothesis,
            detail: detail.into(),
        }
    }

    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    /// True for refusals of the request, as opposed to malformed input.
    pub fn is_refusal(&self) -> bool {
        matches!(
            self,
            Error::Hypothesis { .. } | Error::BudgetExceeded { .. } | Error::InvalidParameter(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("input shape: {0}")]
    Shape(String),

    #[error("index {index} out of range (bound {bound})")]
    IndexOutOfRange { index: usize, bound: usize },

    #[error("value {value} outside allowed range {range}")]
    Range { value: i64, range: String },

    /// Exact enumeration would exceed the configured budget. `lower_bound`
    /// carries the best value established before stopping, when the
    /// operation has a meaningful one.
    #[error("enumeration budget of {budget} exceeded{}", .lower_bound.map(|b| format!(" (best lower bound so far: {b})")).unwrap_or_default())]
    BudgetExceeded { budget: u64, lower_bound: Option<i64> },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("integer overflow: {0}")]
    Overflow(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

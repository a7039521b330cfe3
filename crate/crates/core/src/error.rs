use thiserror::Error;

/// Errors produced by the extractor library.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter inequality does not hold. The message names the violated
    /// inequality, e.g. `alpha >= lambda/3`.
    #[error("constraint violated: {0}")]
    Constraint(String),

    #[error("length mismatch: {left} bits vs {right} bits")]
    LengthMismatch { left: usize, right: usize },

    #[error("{what} out of range: {value} (must be < {limit})")]
    OutOfRange {
        what: &'static str,
        value: u64,
        limit: u64,
    },

    #[error("seed does not match parameters: {0}")]
    SeedMismatch(String),

    /// An exhaustive enumeration or histogram would not fit the stated bounds.
    #[error("enumeration bound exceeded: {0}")]
    TooLarge(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    /// A truth-table file is malformed.
    #[error("malformed truth-table file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

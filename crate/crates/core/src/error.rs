//! Error type shared across the library.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument escaped the mathematical domain of an operation
    /// (e.g. evaluating a Lévy density at `x <= 0`).
    #[error("domain error: {0}")]
    Domain(String),

    /// A structurally invalid input (bad window, wrong basis order, empty sample).
    #[error("invalid input: {0}")]
    Invalid(String),

    /// A numeric guard tripped: the requested computation sits outside the
    /// regime in which its formula is meaningful (e.g. `h1 * m <= e`).
    #[error("numeric guard: {0}")]
    Numeric(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }
    pub fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }
}

use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the function.
    #[error("domain error: {0}")]
    Domain(String),

    /// A construction is undefined for the given inputs.
    #[error(
        "undefined: {message}{}",
        min_valid_n.map(|n| format!(" (smallest valid N is {n})")).unwrap_or_default()
    )]
    Undefined {
        message: String,
        /// Smallest N for which the construction is defined, when one exists.
        min_valid_n: Option<u64>,
    },

    /// Bracketing or iteration failed.
    #[error("solver error: {0}")]
    Solver(String),

    /// The requested moment diverges for the given tail behavior.
    #[error("infinite moment: {0}")]
    InfiniteMoment(String),

    /// Input data failed validation.
    #[error("validation error: {0}")]
    Validation(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

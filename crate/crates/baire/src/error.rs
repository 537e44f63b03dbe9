use thiserror::Error;

/// Crate-wide error type. The CLI maps each variant to a fixed exit code.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    /// Precondition violation or arithmetic overflow of the u64 code space.
    #[error("domain error: {0}")]
    Domain(String),

    /// A bounded search ran out before the defining existential was witnessed.
    /// This signals "no modulus found within the bound", never falsity.
    #[error("fuel exhausted: {context} (stuck at prefix length {at})")]
    FuelExhausted { context: String, at: u64 },

    /// Malformed input document.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn fuel(context: impl Into<String>, at: u64) -> Self {
        Error::FuelExhausted {
            context: context.into(),
            at,
        }
    }

    /// Exit code class used by the CLI: 1 domain, 2 fuel, 3 parse.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_) => 1,
            Error::FuelExhausted { .. } => 2,
            Error::Parse(_) => 3,
        }
    }
}

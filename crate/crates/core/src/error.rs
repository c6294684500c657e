use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A sieve or experiment would exceed the configured memory cap.
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error("{value} is outside the supported range (limit {limit})")]
    OutOfRange { value: u64, limit: u64 },
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("unsupported state function: {0}")]
    Unsupported(String),
    #[error("integer overflow while computing {0}")]
    Overflow(&'static str),
    #[error("invalid experiment spec: {}", .0.join("; "))]
    Validation(Vec<String>),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization error: {0}")]
    Serialization(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

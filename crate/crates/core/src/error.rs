use thiserror::Error;

/// Errors raised by the simulation, ansatz, metric and cutting routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A requested size exceeds what the routine is willing to allocate or enumerate.
    #[error("capacity exceeded: {what} = {requested} (limit {limit})")]
    Capacity { what: &'static str, requested: u64, limit: u64 },

    #[error("{what} index {index} out of range (size {size})")]
    Index { what: &'static str, index: usize, size: usize },

    #[error("invalid argument: {0}")]
    Argument(String),

    /// The inputs are valid but the quantity is mathematically undefined.
    #[error("undefined value: {0}")]
    Domain(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn arg<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Argument(msg.into()))
}

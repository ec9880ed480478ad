use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("{0}")]
    Domain(String),

    /// A query index lies outside the table that serves it.
    #[error("index {index} outside 1..={limit}")]
    Index { index: u64, limit: u64 },

    /// The request would exceed a configured size or integer width.
    #[error("capacity exceeded: {what} needs {requested}, cap is {cap}")]
    Capacity { what: &'static str, requested: u128, cap: u128 },

    /// A scan retained no minor-arc sample.
    #[error("empty scan: all {samples} samples at N={n}, Q={q} fell on major arcs")]
    EmptyScan { n: u64, q: u64, samples: usize },

    /// Floating point evaluation lost the precision the operation needs.
    #[error("numeric: {0}")]
    Numeric(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

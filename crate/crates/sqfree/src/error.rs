use std::fmt;

use serde_json::json;

/// Failure of a CLI run, carrying the exit status class.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Capacity(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn validation(msg: impl fmt::Display) -> Self {
        CliError::Validation(msg.to_string())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Capacity(_) => 3,
            CliError::Runtime(_) => 4,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Validation(_) => "validation",
            CliError::Capacity(_) => "capacity",
            CliError::Runtime(_) => "runtime",
        }
    }

    /// The one-line JSON form written to stderr.
    pub fn to_line(&self) -> String {
        json!({ "schema": crate::SCHEMA, "error": self.kind(), "message": self.to_string() }).to_string()
    }
}

impl From<sqfree_core::Error> for CliError {
    fn from(e: sqfree_core::Error) -> Self {
        use sqfree_core::Error as E;
        match e {
            E::Domain(_) | E::Index { .. } => CliError::Validation(e.to_string()),
            E::Capacity { .. } => CliError::Capacity(e.to_string()),
            E::EmptyScan { .. } | E::Numeric(_) => CliError::Runtime(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(format!("io: {e}"))
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Runtime(format!("csv: {e}"))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Runtime(format!("json: {e}"))
    }
}

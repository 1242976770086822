//! Error type shared by every module in the crate.
//!
//! Variants split into two families: configuration/validation problems
//! (rejected before any computation starts) and runtime failures (a
//! computation was attempted and did not complete). The CLI maps the two
//! families to distinct exit codes.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter violated its documented precondition (e.g. a nonpositive
    /// threshold or resistance).
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// An input lay outside a function's mathematical domain (e.g. a negative
    /// Lambert W argument).
    #[error("domain error: {0}")]
    Domain(String),

    /// An iterative numeric routine failed to converge or produced a
    /// non-finite value.
    #[error("numeric failure: {0}")]
    Numeric(String),

    /// Vector/matrix dimensions disagreed.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// No resistance satisfies the requested calibration constraint.
    #[error("calibration infeasible: {0}")]
    Calibration(String),

    /// A CLI flag or config-file entry could not be interpreted.
    #[error("configuration error: {0}")]
    Config(String),

    /// A solver run aborted mid-trajectory; carries the iteration index.
    #[error("solver failed at iteration {iteration}: {source}")]
    Run {
        iteration: usize,
        #[source]
        source: Box<Error>,
    },

    /// An I/O operation failed; carries the path for context.
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Exit status for the CLI: 2 for configuration/validation errors,
    /// 1 for runtime failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parameter(_)
            | Error::Domain(_)
            | Error::Shape(_)
            | Error::Calibration(_)
            | Error::Config(_) => 2,
            Error::Numeric(_) | Error::Run { .. } | Error::Io { .. } => 1,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_split_validation_from_runtime() {
        assert_eq!(Error::Parameter("x".into()).exit_code(), 2);
        assert_eq!(Error::Calibration("x".into()).exit_code(), 2);
        assert_eq!(Error::Config("x".into()).exit_code(), 2);
        assert_eq!(Error::Numeric("x".into()).exit_code(), 1);
        let run = Error::Run {
            iteration: 3,
            source: Box::new(Error::Numeric("overflow".into())),
        };
        assert_eq!(run.exit_code(), 1);
    }

    #[test]
    fn run_error_message_carries_iteration_and_cause() {
        let e = Error::Run {
            iteration: 17,
            source: Box::new(Error::Numeric("non-finite input".into())),
        };
        let msg = e.to_string();
        assert!(msg.contains("iteration 17"), "got: {msg}");
        assert!(msg.contains("non-finite input"), "got: {msg}");
    }
}

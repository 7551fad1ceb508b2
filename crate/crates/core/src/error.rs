//! Crate-wide error type.
//!
//! The taxonomy mirrors how callers should react:
//!
//! - [`Error::Domain`]: the request itself is malformed (bad geometry, bond
//!   dimension zero, mismatched lengths). A caller bug; not retryable.
//! - [`Error::Capability`]: the request is well-formed but exceeds what this
//!   implementation supports (system too large for a dense backend, sector
//!   dimension over the solver limit). Retrying with a smaller problem works.
//! - [`Error::NumericalConsistency`]: an internal cross-check failed at run
//!   time (an expectation value grew a large imaginary part, a residual did
//!   not converge, a gradient self-check disagreed). These indicate a real
//!   numerical problem and are never downgraded to warnings.
//! - [`Error::Config`] / [`Error::Io`] / [`Error::Format`]: configuration
//!   parsing, filesystem, and (de)serialization failures.

use thiserror::Error;

/// Convenience alias used by every fallible function in the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Crate-wide error enum.
#[derive(Debug, Error)]
pub enum Error {
    /// The input violates a documented precondition.
    #[error("domain error: {0}")]
    Domain(String),

    /// The input is valid but beyond this implementation's limits.
    #[error("capability exceeded: {0}")]
    Capability(String),

    /// A runtime numerical cross-check failed.
    #[error("numerical consistency check failed: {0}")]
    NumericalConsistency(String),

    /// A configuration file could not be parsed or has invalid contents.
    #[error("config error: {0}")]
    Config(String),

    /// Filesystem failure.
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    /// Serialization or deserialization failure.
    #[error("format error: {0}")]
    Format(String),
}

impl Error {
    /// Shorthand for a [`Error::Domain`] with a formatted message.
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Shorthand for a [`Error::Capability`] with a formatted message.
    pub fn capability(msg: impl Into<String>) -> Self {
        Error::Capability(msg.into())
    }

    /// Shorthand for a [`Error::NumericalConsistency`].
    pub fn numerical(msg: impl Into<String>) -> Self {
        Error::NumericalConsistency(msg.into())
    }

    /// Shorthand for a [`Error::Config`].
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    /// Shorthand for a [`Error::Format`].
    pub fn format(msg: impl Into<String>) -> Self {
        Error::Format(msg.into())
    }
}

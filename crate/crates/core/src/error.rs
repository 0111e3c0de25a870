//! Error type shared by every module in the crate.

use thiserror::Error;

/// Errors surfaced by the numerical operations.
///
/// Numerical degradations that can be quantified (wide error bars, vacuous
/// bounds) are reported inside result types instead; an `Err` always means the
/// requested computation could not be carried out as specified.
#[derive(Debug, Error)]
pub enum NodalError {
    /// Evaluation requested outside the region where a representation is valid.
    #[error("evaluation outside validity region: {context} (|z| = {value:.6e}, limit {limit:.6e})")]
    OutOfDomain {
        context: &'static str,
        value: f64,
        limit: f64,
    },

    /// A documented precondition of an operation was violated.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Input is degenerate for the requested measurement (e.g. an identically
    /// vanishing field, or a zero sitting on the contour of integration).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// An iteration failed to converge within its budget.
    #[error("no convergence after {iterations} iterations: {context}")]
    NoConvergence { context: String, iterations: usize },

    /// The request exceeds what double precision can represent through this
    /// pipeline; `max_safe` is the largest admissible parameter.
    #[error("{context}: requested {requested} exceeds the overflow-safe bound, largest safe value is {max_safe}")]
    Capability {
        context: &'static str,
        requested: usize,
        max_safe: usize,
    },

    /// A multi-step construction failed even after its retry policy.
    #[error("construction failed after {retries} retries: {message}")]
    Construction { message: String, retries: usize },

    /// Malformed external data (CSV grids, serialized artifacts).
    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, NodalError>;

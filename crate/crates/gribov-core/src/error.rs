//! Error surface. Messages carry the offending values; callers that need to
//! distinguish failure classes match on the variant.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Structurally bad input: dimensions, ranges, flags.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// An operation's mathematical hypothesis does not hold (e.g. accretivity
    /// needs mu > 0). Distinct from InvalidInput so the CLI can report it as a
    /// computational failure rather than a config error.
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    /// sigma too close to an unperturbed eigenvalue for the resolvent.
    #[error("pole proximity: {0}")]
    PoleProximity(String),

    /// Iterative eigensolver ran out of iterations.
    #[error("eigensolver did not converge: {0}")]
    NoConvergence(String),

    /// Order-doubling certification failed.
    #[error("quadrature did not converge: {0}")]
    Quadrature(String),
}

//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter violated its domain (negative rate, probability outside
    /// [0,1], exponent at or below 1, ...).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A numerical inversion has no solution in the admissible range.
    #[error("no solution: {0}")]
    NoSolution(String),

    /// The requested operation is outside the analytical model.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Moment fitting was handed moments no member of the target family
    /// can reproduce, even after clamping.
    #[error("infeasible moments: {0}")]
    InfeasibleMoments(String),

    /// Adaptive quadrature stalled before reaching the requested accuracy.
    #[error("quadrature did not converge: achieved {achieved:.3e}, requested {requested:.3e}")]
    QuadratureNoConvergence { achieved: f64, requested: f64 },

    /// Fixed-point bracketing or iteration failed.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// Scenario file could not be parsed or failed schema validation.
    #[error("scenario: {0}")]
    Scenario(String),

    /// A simulation run would exceed the configured memory budget.
    #[error("memory guard: {0}")]
    MemoryGuard(String),

    /// Wraps an error with the id of the cache node it occurred at.
    #[error("at node `{node}`: {source}")]
    AtNode {
        node: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn at_node(self, node: impl Into<String>) -> Error {
        Error::AtNode {
            node: node.into(),
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

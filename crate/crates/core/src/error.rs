use thiserror::Error;

/// Error type shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Input violates a stated precondition (non-unit vector, parameter out
    /// of its admissible range, inconsistent scenario, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// Geometric degeneracy: rank-deficient immersion, point off a boundary,
    /// tangential intersection.
    #[error("geometry error: {0}")]
    Geometry(String),

    /// A query at a singular boundary point (cone apex, wedge edge).
    #[error("singular boundary point: {0}")]
    Singular(String),

    /// An iterative solver failed to converge; carries the best value found.
    #[error("numerical error: {msg} (best value {best})")]
    Numerical { msg: String, best: f64 },

    /// A norm family cannot be evaluated at the requested point.
    #[error("evaluation error: {0}")]
    Evaluation(String),

    /// The positive-definiteness condition on A_F fails.
    #[error("invalid Minkowski norm: {0}")]
    InvalidNorm(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("schema error: {0}")]
    Schema(String),
}

pub type Result<T> = std::result::Result<T, Error>;

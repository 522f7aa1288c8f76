use thiserror::Error;

/// Failures reported by the analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Malformed or inconsistent input (shapes, non-finite entries, zero vectors).
    #[error("invalid input: {0}")]
    Input(String),

    /// A norm that the requested operation cannot evaluate exactly.
    #[error("unsupported norm: {0}")]
    UnsupportedNorm(String),

    /// Spectral structure outside the supported generic cases.
    #[error("unsupported spectral structure: {0}")]
    Unsupported(String),

    /// The initial value has (numerically) no component along the rightmost
    /// left eigenvector(s), so the asymptotic limit does not exist.
    #[error("RLGE condition violated: margin {margin:.3e} below tolerance {tol:.3e}")]
    Rlge { margin: f64, tol: f64 },

    /// Overflow, underflow or a vanishing denominator.
    #[error("numeric range error: {0}")]
    Range(String),
}

pub type Result<T> = std::result::Result<T, Error>;

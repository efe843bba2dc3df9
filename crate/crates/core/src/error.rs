use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Invalid experiment or ensemble configuration.
    #[error("configuration error: {0}")]
    Config(String),
    /// An argument is outside the domain of the operation.
    #[error("invalid argument: {0}")]
    Argument(String),
    /// Matrix or vector dimensions do not fit the operation.
    #[error("dimension error: {0}")]
    Dimension(String),
    /// An iterative solver failed to converge.
    #[error("no convergence for eigenvalue {index} after {iterations} iterations")]
    NoConvergence { index: usize, iterations: usize },
    /// A linear solve hit a (numerically) singular pivot.
    #[error("singular input: {0}")]
    Singular(String),
    /// Initial points of the transition kernel are too close together.
    #[error("degenerate initial configuration: {0}")]
    Degenerate(String),
    /// Density mass reaches the grid boundary.
    #[error("domain error: {0}")]
    Domain(String),
    /// The grid does not resolve the requested derivatives.
    #[error("resolution error: {0}")]
    Resolution(String),
    /// A contour passes through a pole of the kernel integrand.
    #[error("contour configuration error: {0}")]
    Contour(String),
    /// Quadrature error estimate is above the requested tolerance.
    #[error("accuracy error: estimated error {estimate:.3e} exceeds tolerance {tolerance:.3e}; increase the truncation length or node count")]
    Accuracy { estimate: f64, tolerance: f64 },
}

impl Error {
    /// Whether the error comes from a numerical failure rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NoConvergence { .. }
                | Error::Singular(_)
                | Error::Domain(_)
                | Error::Resolution(_)
                | Error::Accuracy { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

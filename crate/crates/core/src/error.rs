use num_complex::Complex64;
use thiserror::Error;

/// Every failure the library reports.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum AtlasError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("point {zeta} lies within the exclusion radius of the pole at {pole}")]
    Pole { zeta: Complex64, pole: Complex64 },

    #[error("point {0} is on the branch cut; evaluate the continuation instead")]
    Cut(Complex64),

    #[error("quadrature did not reach tolerance (estimated error {error:e} for value {value:e})")]
    Quadrature { value: f64, error: f64 },

    #[error("point {zeta} is too deep for the deformed contour (strip depth {depth:e})")]
    Strip { zeta: Complex64, depth: f64 },

    #[error("no convergence after {iterations} iterations (last residual {residual:e} at {zeta})")]
    NoConvergence {
        iterations: usize,
        residual: f64,
        zeta: Complex64,
    },

    #[error("iterate captured by the pole at {pole}")]
    PoleCapture { pole: Complex64 },

    #[error("tracking lost at parameter value {param}")]
    TrackingLost { param: f64 },

    #[error("the two tracked zeros merged near parameter value {param}; regime undefined")]
    DegenerateRegime { param: f64 },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("overflow while computing {0}")]
    Overflow(String),
}

pub type Result<T, E = AtlasError> = std::result::Result<T, E>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(AtlasError::Domain(msg.into()))
}

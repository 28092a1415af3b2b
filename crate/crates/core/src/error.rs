use thiserror::Error;

/// Errors raised across the calculus.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },

    #[error("singular element: {0}")]
    Singular(String),

    #[error("argument lies on the singular sphere: {0}")]
    Domain(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("pole of the function at {0}")]
    Pole(String),

    #[error("components do not commute: max commutator norm {max_norm:.3e} between T{}/T{} exceeds tolerance {tol:.3e}", .pair.0, .pair.1)]
    NonCommuting {
        max_norm: f64,
        pair: (usize, usize),
        tol: f64,
    },

    #[error("point is in (or too close to) the F-spectrum: sphere (s0={center}, r={radius}), condition estimate {condition:.3e}")]
    SpectralPoint {
        center: f64,
        radius: f64,
        condition: f64,
    },

    #[error("contour construction failed: {0}")]
    Contour(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

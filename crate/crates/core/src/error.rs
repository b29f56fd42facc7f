use num_complex::Complex64;
use thiserror::Error;

/// Failure modes shared by every computation in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("operator dimension must be at least 1")]
    Empty,
    #[error("matrix contains non-finite entries")]
    NonFinite,
    #[error("NotHermitian: max |A - A^H| = {deviation:e} exceeds tolerance {tol:e}")]
    NotHermitian { deviation: f64, tol: f64 },
    #[error("eigen-solver did not converge")]
    ConvergenceFailure,
    #[error("numerically singular shifted system")]
    SingularSolve,
    #[error("SpectrumHit: z = {z} lies within {distance:e} of the spectrum")]
    SpectrumHit { z: Complex64, distance: f64 },
    #[error("contour passes within {distance:e} of an eigenvalue (margin {margin:e})")]
    ContourTooClose { distance: f64, margin: f64 },
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("invalid grid: {0}")]
    Grid(String),
    #[error("grid [{have_lo}, {have_hi}] does not cover required range [{need_lo}, {need_hi}]")]
    Coverage { need_lo: f64, need_hi: f64, have_lo: f64, have_hi: f64 },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("function is not compactly supported inside the safety margin (max |phi| = {outside:e} on outer band)")]
    Support { outside: f64 },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("matrix is not unitary: max |U^H U - I| = {deviation:e}")]
    NotUnitary { deviation: f64 },
    #[error("storage of {required} bytes exceeds budget of {budget} bytes")]
    MemoryBudget { required: usize, budget: usize },
    #[error("unsupported transform: {0}")]
    UnsupportedTransform(String),
    #[error("format error: {0}")]
    Format(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

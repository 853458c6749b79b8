//! Error type shared by every module.

use thiserror::Error;

/// Failures reported by the library. Each variant names the offending object
/// so that callers (in particular the CLI) can produce actionable messages.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    Geometry(String),
    #[error("degenerate panel {index}: length {length:e}")]
    DegeneratePanel { index: usize, length: f64 },
    #[error("empty cone at node {node} (aperture {aperture}); the corner blocks every direction")]
    EmptyCone { node: usize, aperture: f64 },
    #[error("invalid coefficients: {0}")]
    Coefficients(String),
    #[error("non-elliptic coefficient field: lambda = {lambda:e} at x = {x}")]
    NotElliptic { lambda: f64, x: f64 },
    #[error("pole and evaluation point coincide at ({x}, {y})")]
    CoincidentPoints { x: f64, y: f64 },
    #[error("unsupported constant matrix: {0}")]
    UnsupportedMatrix(String),
    #[error("Fourier evaluator failed: {0}")]
    Fourier(String),
    #[error(
        "point at distance {distance:e} from the boundary is below the resolution floor {floor:e}"
    )]
    Resolution { distance: f64, floor: f64 },
    #[error(
        "nontangential extrapolation did not converge at node {node} (discrepancy {discrepancy:e})"
    )]
    Extrapolation { node: usize, discrepancy: f64 },
    #[error("linear solve failed: {0}")]
    LinearSolve(String),
    #[error("operator is not invertible: condition estimate {condition:e}")]
    IllConditioned { condition: f64 },
    #[error("incompatible data: {0}")]
    IncompatibleData(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("path integration failed: {0}")]
    Path(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

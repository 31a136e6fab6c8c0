use thiserror::Error;

/// Errors raised by the geometry kernels, solvers and file readers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid space specification: {0}")]
    InvalidSpec(String),

    #[error("space {0} has no geometric realization (formula-level support only)")]
    UnrealizedSpace(String),

    #[error("tangent vector of length {length} exceeds the injectivity radius {radius}")]
    BeyondInjectivityRadius { length: f64, radius: f64 },

    #[error("point lies in the cut locus of the base point (distance {distance})")]
    CutLocus { distance: f64 },

    #[error("argument outside the valid domain: {0}")]
    DomainError(String),

    #[error(
        "radius {r} is past the eigenvalue crossing at {threshold}: the closed form is no longer the first eigenvalue"
    )]
    CrossingViolation { r: f64, threshold: f64 },

    #[error("operation requires a {expected} space")]
    KindError { expected: &'static str },

    #[error("invalid point: {0}")]
    InvalidPoint(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid point cloud: {0}")]
    InvalidCloud(String),

    #[error("cloud diameter {diameter} exceeds the admissible bound {bound}")]
    DiameterViolation { diameter: f64, bound: f64 },

    #[error("center-of-mass iteration did not converge after {iterations} iterations (residual {residual})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("degenerate triangle {cell}: triangle-inequality slack {slack}")]
    DegenerateTriangle { cell: usize, slack: f64 },

    #[error("mesh is not a closed manifold: {0}")]
    NonManifold(String),

    #[error("eigensolver did not converge after {iterations} iterations (residual {residual})")]
    SolverNonConvergence { iterations: usize, residual: f64 },

    #[error("function has zero mass norm")]
    ZeroFunction,

    #[error("unsupported shape family: {0}")]
    UnsupportedFamily(String),

    #[error("vertex {vertex} is within {distance} of the center")]
    VertexAtCenter { vertex: usize, distance: f64 },

    #[error("hypersurface leaves the ball of radius {bound} about the center (max distance {max_distance})")]
    BallViolation { max_distance: f64, bound: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

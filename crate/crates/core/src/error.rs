use thiserror::Error;

use crate::geometry::Point3;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("point {0} lies on the Dirichlet/Neumann partition curve")]
    OnPartitionCurve(Point3),

    #[error("unknown coefficient `{0}` (expected const, exp_linear or one_plus_x1_squared)")]
    UnknownCoefficient(String),

    #[error("invalid coefficient parameters: {0}")]
    InvalidCoefficient(String),

    #[error("coincident points {0}")]
    CoincidentPoints(Point3),

    #[error("target {0} lies on the boundary surface; use the direct-value operator")]
    TargetOnSurface(Point3),

    #[error("operation requires the unit sphere, mesh radius is {0}")]
    NonUnitSphere(f64),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("singular matrix: {0}")]
    Singular(String),

    #[error("ill-conditioned Dirichlet single-layer block (condition estimate {condition:.3e})")]
    IllConditioned { condition: f64 },

    #[error("GMRES did not converge in {iterations} iterations (relative residual {residual:.3e})")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("unknown manufactured case `{0}`")]
    UnknownCase(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

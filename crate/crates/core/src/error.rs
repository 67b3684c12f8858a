//! Error type shared by all solver modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("INVALID_GEOMETRY: {0}")]
    InvalidGeometry(String),
    #[error("MESHING_FAILED: {0}")]
    MeshingFailed(String),
    #[error("INVALID_MESH: {0}")]
    InvalidMesh(String),
    #[error("SPACE_MISMATCH: {0}")]
    SpaceMismatch(String),
    #[error("NONPOSITIVE_JACOBIAN: J = {value:.6e} in cell {cell} at ({x:.4}, {y:.4})")]
    NonpositiveJacobian { cell: usize, x: f64, y: f64, value: f64 },
    #[error("SINGULAR_MATRIX: {0}")]
    SingularMatrix(String),
    #[error("SINGULAR_JACOBIAN: {0}")]
    SingularJacobian(String),
    #[error("NO_CONVERGENCE: residual {residual:.6e} after {iterations} iterations")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("PARAMETER_OUT_OF_RANGE: {0}")]
    ParameterOutOfRange(String),
    #[error("MAX_SUBITER_EXCEEDED: {count} subiterations, increments p {inc_p:.3e}, d {inc_d:.3e}")]
    MaxSubiterExceeded { count: usize, inc_p: f64, inc_d: f64 },
    #[error("RANK_DEFICIENT: requested {requested} modes, numerical rank {rank}")]
    RankDeficient { requested: usize, rank: usize },
    #[error("ZERO_SNAPSHOTS: {0}")]
    ZeroSnapshots(String),
    #[error("DIMENSION_MISMATCH: {0}")]
    DimensionMismatch(String),
    #[error("GRID_MISMATCH: {0}")]
    GridMismatch(String),
    #[error("INVALID_CONFIG: {0}")]
    InvalidConfig(String),
    #[error("IO_ERROR: {0}")]
    Io(#[from] std::io::Error),
    #[error("FORMAT_ERROR: {0}")]
    Format(String),
    #[error("step {step}: {source}")]
    AtStep {
        step: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// Stable machine-readable code, used by the CLI on stderr.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidGeometry(_) => "INVALID_GEOMETRY",
            Error::MeshingFailed(_) => "MESHING_FAILED",
            Error::InvalidMesh(_) => "INVALID_MESH",
            Error::SpaceMismatch(_) => "SPACE_MISMATCH",
            Error::NonpositiveJacobian { .. } => "NONPOSITIVE_JACOBIAN",
            Error::SingularMatrix(_) => "SINGULAR_MATRIX",
            Error::SingularJacobian(_) => "SINGULAR_JACOBIAN",
            Error::NoConvergence { .. } => "NO_CONVERGENCE",
            Error::ParameterOutOfRange(_) => "PARAMETER_OUT_OF_RANGE",
            Error::MaxSubiterExceeded { .. } => "MAX_SUBITER_EXCEEDED",
            Error::RankDeficient { .. } => "RANK_DEFICIENT",
            Error::ZeroSnapshots(_) => "ZERO_SNAPSHOTS",
            Error::DimensionMismatch(_) => "DIMENSION_MISMATCH",
            Error::GridMismatch(_) => "GRID_MISMATCH",
            Error::InvalidConfig(_) => "INVALID_CONFIG",
            Error::Io(_) => "IO_ERROR",
            Error::Format(_) => "FORMAT_ERROR",
            Error::AtStep { source, .. } => source.code(),
        }
    }

    /// Wraps an error with the time-step index at which it occurred.
    pub fn at_step(self, step: usize) -> Error {
        Error::AtStep { step, source: Box::new(self) }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

//! Error-to-exit-code mapping: 0 ok, 1 internal/IO, 2 input schema, 3 shape
//! or consistency.

use hoi_forge_core::conditioning::{ConditioningError, ShapeError};
use hoi_forge_core::hand::MeshError;
use hoi_forge_core::metrics::{MetricError, MetricFileError};
use hoi_forge_core::raster::RasterError;
use hoi_forge_core::trajectory::TrajectoryError;

#[derive(Debug)]
pub enum CliError {
    /// Exit 1: IO failures and unexpected conditions.
    Internal(String),
    /// Exit 2: malformed or invalid input files and configuration.
    Schema(String),
    /// Exit 3: shape or consistency mismatches between otherwise valid inputs.
    Shape(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Internal(_) => 1,
            CliError::Schema(_) => 2,
            CliError::Shape(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Internal(m) => write!(f, "error: {m}"),
            CliError::Schema(m) => write!(f, "input schema error: {m}"),
            CliError::Shape(m) => write!(f, "shape/consistency error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Internal(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Schema(e.to_string())
    }
}

impl From<MeshError> for CliError {
    fn from(e: MeshError) -> Self {
        match e {
            MeshError::Io(io) => CliError::Internal(io.to_string()),
            other => CliError::Schema(other.to_string()),
        }
    }
}

impl From<TrajectoryError> for CliError {
    fn from(e: TrajectoryError) -> Self {
        match e {
            TrajectoryError::Io(io) => CliError::Internal(io.to_string()),
            other => CliError::Schema(other.to_string()),
        }
    }
}

impl From<RasterError> for CliError {
    fn from(e: RasterError) -> Self {
        match e {
            RasterError::Io(io) => CliError::Internal(io.to_string()),
            RasterError::PngEncode(enc) => CliError::Internal(enc.to_string()),
            RasterError::TopologyMismatch(m) => CliError::Shape(m),
            RasterError::NoForeground => CliError::Shape(e.to_string()),
            other => CliError::Schema(other.to_string()),
        }
    }
}

impl From<ShapeError> for CliError {
    fn from(e: ShapeError) -> Self {
        CliError::Shape(e.to_string())
    }
}

impl From<ConditioningError> for CliError {
    fn from(e: ConditioningError) -> Self {
        match e {
            ConditioningError::Shape(s) => CliError::Shape(s.to_string()),
            ConditioningError::Io(io) => CliError::Internal(io.to_string()),
            other => CliError::Schema(other.to_string()),
        }
    }
}

impl From<MetricError> for CliError {
    fn from(e: MetricError) -> Self {
        CliError::Shape(e.to_string())
    }
}

impl From<MetricFileError> for CliError {
    fn from(e: MetricFileError) -> Self {
        match e {
            MetricFileError::Io(io) => CliError::Internal(io.to_string()),
            MetricFileError::Metric(m) => CliError::Shape(m.to_string()),
            other => CliError::Schema(other.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

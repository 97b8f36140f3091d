use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the segmentation pipeline.
#[derive(Debug, Error)]
pub enum SrgError {
    #[error("i/o failure on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("unsupported format: {0}")]
    UnsupportedFormat(String),
    #[error("corrupt header: {0}")]
    CorruptHeader(String),
    #[error("volume contains non-finite data at voxel {index}")]
    NonFiniteData { index: usize },
    #[error("volume kind mismatch: {0}")]
    KindMismatch(String),
    #[error("value {value} cannot be stored as {datatype}")]
    Unrepresentable { value: f64, datatype: &'static str },
    #[error("invalid volume: {0}")]
    InvalidVolume(String),
    #[error("geometry mismatch: {0}")]
    GeometryMismatch(String),
    #[error("slice index {index} out of range for axis of length {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("invalid phantom spec: {0}")]
    InvalidSpec(String),
    #[error("volume is empty")]
    EmptyVolume,
    #[error("label {0} is absent from the label volume")]
    MissingLabel(u32),
    #[error("inconsistent label maps: {0}")]
    InconsistentLabelMaps(String),
    #[error("graph parse error at line {line}: {msg}")]
    GraphParse { line: usize, msg: String },
    #[error("invalid weights: {0}")]
    InvalidWeights(String),
    #[error("assignment has length {got}, expected {expected}")]
    AssignmentLengthMismatch { got: usize, expected: usize },
    #[error("assignment entry {value} at position {position} is not a valid model vertex")]
    InvalidAssignment { position: usize, value: String },
    #[error("instance too large for exhaustive search: {size} assignments exceed cap {cap}")]
    InstanceTooLarge { size: u128, cap: u128 },
    #[error("invalid configuration: {0}")]
    Config(String),
}

impl SrgError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        SrgError::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code for this error class.
    ///
    /// 2 = I/O, 3 = format, 4 = geometry, 5 = instance too large, 1 = anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            SrgError::Io { .. } => 2,
            SrgError::UnsupportedFormat(_)
            | SrgError::CorruptHeader(_)
            | SrgError::NonFiniteData { .. }
            | SrgError::KindMismatch(_)
            | SrgError::Unrepresentable { .. }
            | SrgError::GraphParse { .. } => 3,
            SrgError::GeometryMismatch(_) => 4,
            SrgError::InstanceTooLarge { .. } => 5,
            _ => 1,
        }
    }
}

pub type Result<T, E = SrgError> = std::result::Result<T, E>;

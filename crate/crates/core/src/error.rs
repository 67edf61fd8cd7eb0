use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid kernel parameters: {0}")]
    InvalidKernel(String),

    #[error("singular kernel design system for L={length}, p={accuracy}")]
    SingularKernelSystem { length: usize, accuracy: usize },

    #[error("signal length {n} is shorter than the kernel length {length}")]
    SignalTooShort { n: usize, length: usize },

    #[error("unknown boundary condition `{0}`")]
    UnknownBoundary(String),

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("shape mismatch: expected {expected:?}, got {actual:?}")]
    ShapeMismatch {
        expected: (usize, usize, usize),
        actual: (usize, usize, usize),
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("frame dimension {dim} is not divisible by 2^{levels}")]
    WaveletDivisibility { dim: usize, levels: usize },

    #[error("eigendecomposition failed: {0}")]
    Eigensolver(String),

    #[error("non-finite value in {what} at iteration {iteration}")]
    Divergence { what: &'static str, iteration: usize },

    #[error("measurement count {measurements} does not match plan sample count {plan}")]
    MeasurementMismatch { measurements: usize, plan: usize },

    #[error("{path}: bad magic at byte offset 0")]
    BadMagic { path: PathBuf },

    #[error("{path}: truncated payload, expected {expected} bytes but found {actual} (short by {} at byte offset {actual})", expected - actual)]
    Truncated {
        path: PathBuf,
        expected: usize,
        actual: usize,
    },

    #[error("{path}: volume size overflow at byte offset {offset}")]
    SizeOverflow { path: PathBuf, offset: usize },

    #[error("{path}: unsupported dtype byte {dtype} at byte offset 20")]
    BadDtype { path: PathBuf, dtype: u8 },

    #[error("{path}: {reason}")]
    BadPgm { path: PathBuf, reason: String },

    #[error("frame size mismatch: {first} is {first_dims:?} but {second} is {second_dims:?}")]
    MixedFrameSizes {
        first: PathBuf,
        first_dims: (usize, usize),
        second: PathBuf,
        second_dims: (usize, usize),
    },

    #[error("{0}: no PGM frames found")]
    EmptyFrameDirectory(PathBuf),

    #[error("config line {line}: {reason}")]
    Config { line: usize, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Whether the failure comes from numerics or data consistency rather than usage.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::SingularKernelSystem { .. }
                | Error::Eigensolver(_)
                | Error::Divergence { .. }
                | Error::MeasurementMismatch { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

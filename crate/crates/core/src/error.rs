use alloc::string::String;
use core::fmt;

/// Error type shared by all core computations.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Input vector length does not match the space dimension.
    DimensionMismatch { expected: usize, got: usize },
    /// A coordinate was NaN or infinite.
    NonFinite { index: usize },
    /// An index referenced a coordinate outside the space.
    IndexOutOfRange { index: usize, dim: usize },
    /// A cardinality argument exceeded the dimension (e.g. m > n).
    RankTooLarge { m: usize, dim: usize },
    /// Parameters that never describe a valid space, grid, or basis.
    InvalidParameter(String),
    /// The requested exact oracle does not exist for this space kind.
    UnsupportedOracle(&'static str),
    /// An enumeration would exceed the configured cap.
    Capacity {
        what: &'static str,
        needed: u64,
        cap: u64,
    },
    /// A matrix required by the construction is numerically singular.
    SingularMatrix,
    /// An estimator was called with an empty probe family.
    EmptyProbeFamily,
    /// Two tables expected on the same threshold grid disagree about it.
    GridMismatch,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            Error::NonFinite { index } => {
                write!(f, "non-finite entry at coordinate {index}")
            }
            Error::IndexOutOfRange { index, dim } => {
                write!(f, "index {index} out of range for dimension {dim}")
            }
            Error::RankTooLarge { m, dim } => {
                write!(f, "cardinality {m} exceeds dimension {dim}")
            }
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::UnsupportedOracle(what) => {
                write!(f, "exact oracle unsupported: {what}")
            }
            Error::Capacity { what, needed, cap } => {
                write!(f, "capacity exceeded for {what}: needs {needed}, cap {cap}")
            }
            Error::SingularMatrix => write!(f, "matrix is numerically singular"),
            Error::EmptyProbeFamily => write!(f, "probe family is empty"),
            Error::GridMismatch => write!(f, "threshold grids do not match"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;

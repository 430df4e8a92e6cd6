use std::error;
use std::fmt;
use std::io;
use std::result;

/// A type alias for `Result<T, Error>`.
pub type Result<T> = result::Result<T, Error>;

/// Errors produced by this crate.
#[derive(Debug)]
pub enum Error {
    /// A data set must contain at least one sample.
    EmptyDataSet,
    /// A sample's value count does not match the declared shape.
    ShapeMismatch { expected: usize, got: usize },
    /// A sample contains a NaN or infinite entry.
    NonFiniteValue { id: usize },
    /// Requested rank is outside `1..=min(m1, m2)`.
    RankOutOfRange { rank: usize, max: usize },
    /// Requested term count is outside `1..=n`.
    TermsOutOfRange { terms: usize, max: usize },
    /// The operation requires patch-shaped (two-dimensional) samples.
    PatchShapeRequired,
    /// A clustering split needs at least two indices.
    TooFewIndices { got: usize },
    /// The exhaustive oracle refuses index sets above its enumeration bound.
    IndexSetTooLarge { got: usize, max: usize },
    /// Spectral splits are capped to keep the O(N^2) similarity graph tractable.
    SpectralNodeTooLarge { got: usize, max: usize },
    /// The symmetric eigensolver did not converge.
    EigenDidNotConverge,
    /// An id that does not name a node of the tree.
    UnknownNodeId(usize),
    /// Maxoid representatives are only available on nodes produced by the
    /// 2-maxoids splitter.
    MaxoidHintMissing { node: usize },
    /// The root representative is identically zero and cannot be normalized.
    ZeroLowpassAtom,
    /// A dictionary atom is not unit-norm.
    NonUnitNormAtom { order: usize },
    /// The operation is only defined for the stated dictionary kind.
    WrongDictionaryKind { expected: &'static str },
    /// Signal length must be a power of two.
    NotPowerOfTwo { len: usize },
    /// Haar coefficient arrays have inconsistent sizes.
    CoefficientShapeMismatch,
    /// A (level, position) pair outside the transform's range.
    HaarIndexOutOfRange,
    /// The requested patch does not fit inside the image.
    PatchLargerThanImage {
        patch: (usize, usize),
        image: (usize, usize),
    },
    /// Image dimensions differ where equal dimensions are required.
    ImageDimensionMismatch,
    /// A PGM file that could not be parsed.
    MalformedPgm(String),
    /// A data set CSV file that could not be parsed.
    MalformedCsv(String),
    /// An invalid parameter or parameter combination.
    InvalidConfig(String),
    /// An underlying I/O error.
    Io(io::Error),
    /// An underlying JSON (de)serialization error.
    Json(serde_json::Error),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::EmptyDataSet => write!(f, "data set must contain at least one sample"),
            Error::ShapeMismatch { expected, got } => {
                write!(f, "expected {} values per sample, got {}", expected, got)
            }
            Error::NonFiniteValue { id } => {
                write!(f, "sample {} contains a non-finite value", id)
            }
            Error::RankOutOfRange { rank, max } => {
                write!(f, "rank {} outside valid range 1..={}", rank, max)
            }
            Error::TermsOutOfRange { terms, max } => {
                write!(f, "term count {} outside valid range 1..={}", terms, max)
            }
            Error::PatchShapeRequired => {
                write!(f, "operation requires patch-shaped samples")
            }
            Error::TooFewIndices { got } => {
                write!(f, "need at least 2 indices to split, got {}", got)
            }
            Error::IndexSetTooLarge { got, max } => {
                write!(
                    f,
                    "exhaustive oracle limited to {} indices, got {}",
                    max, got
                )
            }
            Error::SpectralNodeTooLarge { got, max } => {
                write!(f, "spectral split limited to {} points, got {}", max, got)
            }
            Error::EigenDidNotConverge => write!(f, "eigensolver did not converge"),
            Error::UnknownNodeId(id) => write!(f, "unknown node id {}", id),
            Error::MaxoidHintMissing { node } => {
                write!(f, "node {} has no stored maxoid", node)
            }
            Error::ZeroLowpassAtom => {
                write!(f, "root representative is zero and cannot be normalized")
            }
            Error::NonUnitNormAtom { order } => {
                write!(f, "dictionary atom {} is not unit-norm", order)
            }
            Error::WrongDictionaryKind { expected } => {
                write!(f, "operation requires a {} dictionary", expected)
            }
            Error::NotPowerOfTwo { len } => {
                write!(f, "signal length {} is not a power of two", len)
            }
            Error::CoefficientShapeMismatch => {
                write!(f, "Haar coefficient arrays have inconsistent sizes")
            }
            Error::HaarIndexOutOfRange => write!(f, "Haar (level, position) out of range"),
            Error::PatchLargerThanImage { patch, image } => write!(
                f,
                "{}x{} patch does not fit inside {}x{} image",
                patch.0, patch.1, image.0, image.1
            ),
            Error::ImageDimensionMismatch => write!(f, "image dimensions differ"),
            Error::MalformedPgm(msg) => write!(f, "malformed PGM: {}", msg),
            Error::MalformedCsv(msg) => write!(f, "malformed CSV: {}", msg),
            Error::InvalidConfig(msg) => write!(f, "invalid configuration: {}", msg),
            Error::Io(err) => write!(f, "I/O error: {}", err),
            Error::Json(err) => write!(f, "JSON error: {}", err),
        }
    }
}

impl error::Error for Error {
    fn source(&self) -> Option<&(dyn error::Error + 'static)> {
        match self {
            Error::Io(err) => Some(err),
            Error::Json(err) => Some(err),
            _ => None,
        }
    }
}

impl From<io::Error> for Error {
    fn from(err: io::Error) -> Error {
        Error::Io(err)
    }
}

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Error {
        Error::Json(err)
    }
}

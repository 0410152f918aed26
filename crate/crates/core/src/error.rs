use std::fmt;

/// Where in an input file a problem was found.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Location {
    /// Byte offset into a binary file.
    Offset(u64),
    /// 1-based line number in a CSV file.
    Line(usize),
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::Offset(o) => write!(f, "byte offset {o}"),
            Location::Line(l) => write!(f, "line {l}"),
        }
    }
}

/// Renders an optional location as a ` at ...` suffix.
struct At(Option<Location>);

impl fmt::Display for At {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Some(loc) => write!(f, " at {loc}"),
            None => Ok(()),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("bad magic at {0}: expected \"FTLE\"")]
    BadMagic(Location),

    #[error("unsupported format version {version}{}", At(Some(*.at)))]
    UnsupportedVersion { version: u32, at: Location },

    #[error("expected a {expected} block, found kind {found}{}", At(Some(*.at)))]
    UnexpectedKind {
        expected: &'static str,
        found: u32,
        at: Location,
    },

    #[error("file truncated at byte offset {0}")]
    Truncated(u64),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("unsupported dimension {dim} (expected 2 or 3){}", At(*.at))]
    UnsupportedDim { dim: u64, at: Option<Location> },

    #[error("face {face} references point {index}, but the mesh has {n_points} points{}", At(*.at))]
    IndexOutOfRange {
        face: usize,
        index: i64,
        n_points: usize,
        at: Option<Location>,
    },

    #[error("face {face} repeats vertex {vertex}{}", At(*.at))]
    RepeatedVertex {
        face: usize,
        vertex: u32,
        at: Option<Location>,
    },

    #[error("{count} points exceed the signed 32-bit index range")]
    TooManyPoints { count: u64 },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

impl Error {
    /// True for errors about the content of otherwise well-formed input
    /// (bad indexes, inconsistent shapes, out-of-range parameters), as
    /// opposed to unreadable or malformed files.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::UnsupportedDim { .. }
                | Error::IndexOutOfRange { .. }
                | Error::RepeatedVertex { .. }
                | Error::TooManyPoints { .. }
                | Error::ShapeMismatch(_)
                | Error::InvalidParameter(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

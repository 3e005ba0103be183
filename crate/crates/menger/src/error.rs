//! Error type shared across the crate.
//!
//! Every variant names the violated precondition so the CLI can surface a
//! precise diagnostic and exit with status 2.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("index {index} out of range for space of {len} points")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("index set must be non-empty: {context}")]
    EmptySet { context: &'static str },

    #[error("matrix validation failed: {reason}")]
    MatrixValidation { reason: String },

    #[error("point validation failed: {reason}")]
    PointValidation { reason: String },

    #[error("terminal count {got} exceeds the exact-solver cap of {cap}{}", eps.map(|e| format!(" (at net level eps = {e})")).unwrap_or_default())]
    TerminalCapExceeded {
        got: usize,
        cap: usize,
        eps: Option<f64>,
    },

    #[error("operation requires a planar euclidean space (dim 2), got {got}")]
    NonPlanar { got: String },

    #[error("parameter out of range: {what}")]
    ParamOutOfRange { what: String },

    #[error("graph is not a valid {expected}: {reason}")]
    InvalidGraph { expected: &'static str, reason: String },

    #[error("tree is not proper: Steiner vertex {vertex} has degree {degree}")]
    NotProper { vertex: usize, degree: usize },

    #[error("cover validation failed: {reason}")]
    InvalidCover { reason: String },

    #[error("cover intersection graph is disconnected; the sample does not discretize a connected set")]
    DisconnectedCover,

    #[error("no junction point available in the intersection of elements {a} and {b} outside the terminal set")]
    JunctionUnavailable { a: usize, b: usize },

    #[error("shapes must share one ambient space: {reason}")]
    InconsistentAmbient { reason: String },

    #[error("extra point {index} is at distance {dist} from the set, beyond the sampling resolution {resolution}")]
    ExtraPointTooFar {
        index: usize,
        dist: f64,
        resolution: f64,
    },

    #[error("malformed input: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

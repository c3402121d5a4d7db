use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{what} = {value} exceeds the supported limit {limit}")]
    Capacity {
        what: &'static str,
        value: u64,
        limit: u64,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{0} is out of range")]
    OutOfRange(String),

    #[error("pole of {0}")]
    Pole(&'static str),

    #[error("character moduli differ: {0} vs {1}")]
    ModulusMismatch(u64, u64),

    #[error("character {0} is not primitive")]
    NotPrimitive(String),

    #[error("cannot parse character label {0:?}")]
    BadLabel(String),

    #[error(
        "zero certification failed for {label}: argument principle gives {argument_count}, \
         sign changes give {sign_changes}"
    )]
    CertificationFailure {
        label: String,
        argument_count: u64,
        sign_changes: u64,
        partial: Box<crate::lfunc::ZeroSet>,
    },

    #[error("zero with real part {beta} off the critical line for {label}")]
    ExceptionalZero { label: String, beta: f64 },

    #[error("contour passes too close to a zero of {label} near height {height}")]
    ContourTooClose { label: String, height: f64 },

    #[error("zero set for {label} only reaches height {available}, {requested} requested")]
    InsufficientZeros {
        label: String,
        available: f64,
        requested: f64,
    },

    #[error("no zero set supplied for character {0}")]
    MissingZeroSet(String),

    #[error("{0} is not a recorded zero")]
    NotAZero(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("validation failed at line {line}: {message}")]
    Validation { line: usize, message: String },

    #[error("grid of {points} points is not exact for x = {x} (needs at least {needed})")]
    InexactGrid { x: u64, points: usize, needed: usize },

    #[error("degenerate sample spread: {0}")]
    DegenerateSpread(String),

    #[error("corrupt data: {0}")]
    Corrupt(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

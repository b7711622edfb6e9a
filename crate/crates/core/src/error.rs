use thiserror::Error;

use crate::geometry::Frame;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite coordinate at point {index}")]
    NonFinitePoint { index: usize },

    #[error("invalid box: {0}")]
    InvalidBox(String),

    #[error("expected a cloud in the {expected} frame, got {found}")]
    Frame { expected: Frame, found: Frame },

    /// No points to build a hull from; callers fall back to a class prototype.
    #[error("no points to build a shape from")]
    NoShape,

    #[error("length mismatch: expected {expected}, got {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("{what} = {value} is outside its domain")]
    Domain { what: &'static str, value: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("empty dataset")]
    EmptyDataset,

    #[error("object is degenerate ({points} points); no signature can be computed")]
    Degenerate { points: usize },

    #[error("degenerate object of class `{0}` has no prototype to fall back on")]
    Unresolvable(String),

    #[error("prototype table was built with a different signature configuration")]
    PrototypeConfigMismatch,
}

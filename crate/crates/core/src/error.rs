use thiserror::Error;

/// Errors raised by the simulation engines and estimators.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("gate is not unitary (max deviation {deviation:.3e})")]
    NonUnitary { deviation: f64 },

    #[error("gate is not a Clifford operation")]
    NonClifford,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("{what} exceeds the dense cap ({size} > {cap})")]
    CapExceeded {
        what: &'static str,
        size: usize,
        cap: usize,
    },

    #[error("invalid region: {0}")]
    InvalidRegion(String),

    #[error("regions overlap")]
    RegionOverlap,

    #[error("malformed Pauli string: {0}")]
    MalformedPauli(String),

    #[error("numerical degeneracy: {0}")]
    NumericalDegeneracy(String),

    #[error("membrane tension is not convex near v = {v}")]
    NonConvexTension { v: f64 },

    #[error("no crossing found in the parameter grid")]
    NoCrossing,

    #[error("fit failed: {0}")]
    Fit(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

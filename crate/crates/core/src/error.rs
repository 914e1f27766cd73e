use thiserror::Error;

/// Errors produced by the geometric, estimation and fitting routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("candidates coincide (distance {distance:e})")]
    DegenerateCandidates { distance: f64 },
    #[error("boundary line does not cross the domain interior")]
    NoChord,
    #[error("constrained region is empty")]
    EmptyRegion,
    #[error("insufficient data: need at least {needed} points, got {got}")]
    InsufficientData { needed: usize, got: usize },
    #[error("{operation} is not defined on the {domain} domain")]
    UnsupportedDomain {
        operation: &'static str,
        domain: &'static str,
    },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;

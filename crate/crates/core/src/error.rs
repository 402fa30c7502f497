use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("expected a real element, got {0}")]
    NotReal(String),
    #[error("singular matrix")]
    Singular,
    #[error("point is not on the boundary at infinity")]
    NotBoundary,
    #[error("point is not in the complex hyperbolic plane")]
    NotInterior,
    #[error("spectrum is not contained in the field")]
    SpectrumOutsideField,
    #[error("not a regular elliptic element")]
    NotRegularElliptic,
    #[error("degenerate isometry: {0}")]
    Degenerate(String),
    #[error("coefficient is not real: {0}")]
    NonRealCoefficient(String),
    #[error("no exact null point found on the complex line")]
    NoNullPoint,
    #[error("point coincides with the requested point at infinity")]
    PointAtNewInfinity,
    #[error("curves too close (distance {0:e}); refine samples or perturb chart")]
    CurvesTooClose(f64),
    #[error("insufficient resolution (residual {0:.3})")]
    InsufficientResolution(f64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

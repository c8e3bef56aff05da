use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("outside validity window: {0}")]
    OutOfValidity(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("insufficient grid coverage: {0}")]
    GridCoverage(String),

    #[error("velocity undefined at x = {x}: density {density:e} below floor {floor:e}")]
    UndefinedVelocity { x: f64, density: f64, floor: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

pub(crate) fn numerical(msg: impl Into<String>) -> Error {
    Error::Numerical(msg.into())
}

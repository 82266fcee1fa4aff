use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("parse error in {path} line {line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("calibration error: {0}")]
    Calibration(String),

    #[error("consistency error: {0}")]
    Consistency(String),

    #[error("assembly error: {0}")]
    Assembly(String),

    #[error("load binding error: {0}")]
    Binding(String),

    #[error("unsupported combination: {0}")]
    Unsupported(String),

    #[error("singular mass matrix at dof {0}")]
    SingularMass(usize),

    /// A configuration constraint was violated; `constraint` names it.
    #[error("config constraint violated ({constraint}): {message}")]
    Validation { constraint: String, message: String },

    #[error("instability at step {step}: max |u| = {max_u:.3e} mm exceeds limit {limit:.3e} mm")]
    Instability { step: usize, max_u: f64, limit: f64 },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub fn geometry(msg: impl Into<String>) -> Self {
        Error::Geometry(msg.into())
    }

    pub fn validation(constraint: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            constraint: constraint.into(),
            message: message.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

use std::path::PathBuf;

use thiserror::Error;

/// Errors raised while building or running an averaging instance.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid has no interior node; refine the resolution")]
    NoInteriorNode,

    #[error("invalid radius function: {0}")]
    InvalidRadius(String),

    #[error("invalid quadrature: {0}")]
    InvalidQuadrature(String),

    #[error("node {0} is not an interior node")]
    NotInterior(usize),

    #[error("stencil at node {node} kept only {kept} quadrature points (need at least {needed})")]
    UnderResolvedStencil {
        node: usize,
        kept: usize,
        needed: usize,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("fields live on different lattices")]
    LatticeMismatch,

    #[error("boundary mismatch at node {node}: field {field} vs oracle {oracle}")]
    BoundaryMismatch {
        node: usize,
        field: f64,
        oracle: f64,
    },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("point outside the closed domain: signed distance {0}")]
    OutsideDomain(f64),

    #[error("expression error in `{expr}`: {msg}")]
    Expression { expr: String, msg: String },

    #[error("config error: {0}")]
    Config(String),

    #[error("malformed field csv: {0}")]
    Csv(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

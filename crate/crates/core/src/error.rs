use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("mesh validation failed for cell {cell}: {msg}")]
    InvalidCell { cell: usize, msg: String },

    #[error("mesh validation failed: {0}")]
    InvalidMesh(String),

    #[error("singular local transform on subtriangle {tri} ({space}): condition number {cond:.3e}")]
    Unisolvence {
        tri: usize,
        space: &'static str,
        cond: f64,
    },

    #[error("incompatible boundary data: residual {residual:.3e} exceeds {tolerance:.3e}")]
    Compatibility { residual: f64, tolerance: f64 },

    #[error("linear solver failure: {0}")]
    Solver(String),

    #[error("non-finite value in transport state at step {step}")]
    NonFinite { step: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

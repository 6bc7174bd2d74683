use std::path::PathBuf;

use thiserror::Error;

use crate::dynamics::Diagnostics;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch { context: &'static str, expected: usize, found: usize },

    #[error("matrix is not Hermitian (max |h - h^dagger| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("eigendecomposition failed to converge for a {dim}x{dim} matrix (norm {norm:e})")]
    EigenFailure { dim: usize, norm: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid system spec: {0}")]
    InvalidSpec(String),

    #[error("imaginary energy residue {residue:e} exceeds tolerance")]
    ImaginaryEnergy { residue: f64 },

    #[error(
        "state lost positivity at t = {time}: min eigenvalue {} (trace dev {:e}, herm dev {:e})",
        .snapshot.min_eig, .snapshot.trace_dev, .snapshot.herm_dev
    )]
    PositivityBreach { time: f64, snapshot: Diagnostics },

    #[error("step-halving check failed: max |delta_E(dt) - delta_E(dt/2)| = {max_diff:e}; try dt = {suggested_dt:e}")]
    StepHalving { max_diff: f64, suggested_dt: f64 },

    #[error("{0}")]
    Usage(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    /// Process exit code for the command-line front end: 1 usage, 2 physics
    /// abort, 3 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::PositivityBreach { .. } | Error::StepHalving { .. } => 2,
            Error::Io { .. } | Error::Csv(_) => 3,
            _ => 1,
        }
    }
}

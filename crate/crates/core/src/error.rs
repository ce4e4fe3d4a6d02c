use thiserror::Error;

use crate::eigensolver::EigenResult;

/// Errors raised anywhere in the solver pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid mesh: {0}")]
    Mesh(String),

    #[error("invalid material data: {0}")]
    Material(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Malformed text input; `line` is 1-based.
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("configuration: {0}")]
    Config(String),

    #[error("factorization of K - sigma*M failed at shift {shift:e}; try a different shift")]
    Factorization { shift: f64 },

    #[error("eigensolver stopped after {iterations} Krylov vectors with {converged} of {wanted} pairs converged")]
    NoConvergence {
        wanted: usize,
        converged: usize,
        iterations: usize,
        partial: Box<EigenResult>,
    },

    #[error("eigensolver: {0}")]
    Eigen(String),

    #[error("fit failed: {0}")]
    Fit(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// Coarse category used by the command-line front end to pick exit codes.
    pub fn category(&self) -> &'static str {
        match self {
            Error::Mesh(_)
            | Error::Material(_)
            | Error::InvalidArgument(_)
            | Error::Parse { .. }
            | Error::Config(_) => "input",
            Error::Factorization { .. } | Error::NoConvergence { .. } | Error::Eigen(_) | Error::Fit(_) => "numerical",
            Error::Io(_) | Error::Csv(_) => "io",
        }
    }
}

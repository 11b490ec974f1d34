use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("grid too small: n_glob = {0}, at least 3 interior nodes per axis are required")]
    GridTooSmall(usize),

    #[error("invalid wave number {0}: must be finite and non-negative")]
    InvalidWaveNumber(f64),

    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("matrix is singular: zero pivot in column {column}")]
    Singular { column: usize },

    #[error("ILU(0) breakdown: zero pivot at row {row}")]
    ZeroPivot { row: usize },

    #[error("invalid sparse structure: {0}")]
    InvalidStructure(String),

    #[error("subdomain count {0} is not a perfect square")]
    NotPerfectSquare(usize),

    #[error("owned block of {size} node(s) along an axis is below the minimum of 2")]
    BlockTooSmall { size: usize },

    #[error("deflation needs at least 4 nodes per axis, got {0}")]
    SubdomainTooSmall(usize),

    #[error("subdomain {id}: {source}")]
    Subdomain {
        id: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),

    #[error("MatrixMarket line {line}: {message}")]
    MatrixMarket { line: usize, message: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("report has no cells to emit")]
    EmptyReport,
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn in_subdomain(self, id: usize) -> Self {
        Error::Subdomain {
            id,
            source: Box::new(self),
        }
    }
}

pub(crate) fn check_dim(context: &'static str, expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            context,
            expected,
            got,
        })
    }
}

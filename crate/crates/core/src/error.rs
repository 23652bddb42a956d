use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is {rows}x{cols}, expected a square matrix")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("index ({i}, {j}) out of bounds for dimension {n}")]
    IndexOutOfBounds { i: usize, j: usize, n: usize },

    #[error("matrix contains a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("numerical breakdown: {0}")]
    Breakdown(String),

    #[error("no stabilising gain up to {mu_max}; largest abscissa per grid gain: {grid:?}")]
    NoStableGain { mu_max: f64, grid: Vec<(f64, f64)> },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

/// Errors raised by the core library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch: fields live on different grids")]
    GridMismatch,

    #[error("parameters fail (H1): {0}")]
    HypothesisFailed(String),

    #[error("degenerate pair: interaction integral {0:e} is below the quadrature floor")]
    DegeneratePair(f64),

    #[error("negative input: rearrangement requires a nonnegative field (min = {0:e})")]
    NegativeInput(f64),

    #[error("grid too large for direct summation: {points} points (limit {limit})")]
    GridTooLarge { points: usize, limit: usize },

    #[error("refused: critical/nonexistence parameters ({0})")]
    Refused(String),

    #[error("stagnation after {iterations} iterations: no energy decrease after {halvings} step halvings")]
    Stagnation {
        iterations: usize,
        halvings: usize,
        /// Last accepted state, handed back so callers can inspect it.
        state: Box<crate::functional::StatePair>,
    },

    #[error("zero field")]
    ZeroField,

    #[error("decay fit: {0}")]
    Fit(String),

    #[error("field file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

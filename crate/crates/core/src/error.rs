use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BackflowError {
    #[error("alpha must be positive and finite, got {0}")]
    InvalidAlpha(f64),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not symmetric: |a[{row}][{col}] - a[{col}][{row}]| = {defect:e}")]
    NotSymmetric { row: usize, col: usize, defect: f64 },

    #[error("eigensolver did not converge after {iterations} iterations (best residual {residual:e}, target {target:e})")]
    NoConvergence {
        iterations: usize,
        residual: f64,
        target: f64,
    },

    #[error("no antisymmetric two-particle states exist for n_max = 0")]
    NoAntisymmetricStates,

    #[error("rank-deficient fit: need at least 3 distinct abscissae, got {distinct}")]
    RankDeficient { distinct: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unknown figure id `{0}` (expected fig1a, fig1b, fig2a or fig2b)")]
    InvalidFigure(String),

    #[error("bound evaluation failed at alpha = {alpha}: {source}")]
    ScanPoint {
        alpha: f64,
        #[source]
        source: Box<BackflowError>,
    },
}

pub type Result<T> = std::result::Result<T, BackflowError>;

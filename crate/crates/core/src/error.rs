use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("mode {mode} out of range for an order-{order} tensor")]
    InvalidMode { mode: usize, order: usize },

    #[error("split {split} out of range for an order-{order} tensor (expected 1..={})", order - 1)]
    InvalidSplit { split: usize, order: usize },

    #[error("invalid dimensions: {0}")]
    InvalidDims(String),

    #[error("shape mismatch: expected {expected}, found {found}")]
    ShapeMismatch { expected: String, found: String },

    #[error("expected {expected} weights, found {found}")]
    WeightLength { expected: usize, found: usize },

    #[error("TT rank chain broken between cores {left} and {right}: {left_rank} != {right_rank}")]
    RankChain {
        left: usize,
        right: usize,
        left_rank: usize,
        right_rank: usize,
    },

    #[error("input contains non-finite values")]
    NonFinite,

    #[error("singular value decomposition did not converge")]
    SvdNoConvergence,

    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),

    #[error("reference tensor has zero Frobenius norm")]
    ZeroNorm,

    #[error("malformed TNSR1 data at byte offset {offset}: {reason}")]
    Format { offset: u64, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn shape(expected: impl ToString, found: impl ToString) -> Self {
        Error::ShapeMismatch {
            expected: expected.to_string(),
            found: found.to_string(),
        }
    }
}

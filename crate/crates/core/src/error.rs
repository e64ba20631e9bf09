use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("coefficient index {index} is beyond the truncation order {order}")]
    BeyondTruncation { index: usize, order: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("linear system is inconsistent")]
    Inconsistent,

    #[error("generators are rank deficient (rank {rank} of {count})")]
    RankDeficient { rank: usize, count: usize },

    #[error("target error {target:e} unreachable: {reason}")]
    TargetUnreachable { target: f64, reason: String },

    #[error("evaluation points are ill-conditioned (ratio {ratio:e} below threshold {threshold:e})")]
    IllConditioned { ratio: f64, threshold: f64 },

    #[error("series diverges for these parameters: {0}")]
    Divergent(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
}

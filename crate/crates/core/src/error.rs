use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("integer overflow while computing {0}")]
    Overflow(&'static str),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("infeasible configuration: {what} = {estimate} exceeds the safety cap {cap} (raise it with BIACT_SAFETY_CAP)")]
    Infeasible {
        what: String,
        estimate: u128,
        cap: u64,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("malformed network JSON: {0}")]
    Parse(String),

    #[error("point has support {support:?}, not contained in any {d_eff}-element coordinate subset")]
    Unroutable { support: Vec<usize>, d_eff: usize },

    #[error("oracle failure: {0}")]
    Oracle(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

use thiserror::Error;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("point {point} is not valid for {system}")]
    VariantMismatch { system: String, point: String },

    #[error("invalid system: {0}")]
    InvalidSystem(String),

    #[error("invalid point: {0}")]
    InvalidPoint(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(
        "candidate budget exceeded: {required} points needed, budget is {budget} \
         (achieved mesh {achieved_mesh})"
    )]
    BudgetExceeded {
        required: u128,
        budget: usize,
        achieved_mesh: f64,
    },

    #[error("{0} is not invertible")]
    NotInvertible(String),

    #[error("sequences are defined over different dynamics")]
    SystemMismatch,

    #[error("instance has {size} candidates; exhaustive search is limited to {limit}")]
    InstanceTooLarge { size: usize, limit: usize },

    #[error("empty instance")]
    EmptyInstance,

    #[error(
        "potential is not locally constant at cylinder length {resolution} \
         (needs {required:?})"
    )]
    NotLocallyConstant { resolution: usize, required: Option<usize> },

    #[error("growth table has {0} usable samples; at least 4 are required")]
    TooFewSamples(usize),

    #[error("grid is not closed under the map")]
    GridNotClosed,

    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;

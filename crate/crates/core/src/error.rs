use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid exponent: {0}")]
    InvalidExponent(String),

    #[error("invalid region: {0}")]
    InvalidRegion(String),

    #[error("unbounded region: volume is infinite")]
    UnboundedRegion,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("budget exceeded: grid needs {nodes} nodes, budget is {budget}")]
    BudgetExceeded { nodes: u128, budget: u64 },

    #[error("sampled field contains a non-finite value at node {0}")]
    NonFinite(usize),

    #[error(
        "undersampled: axis {axis} has spacing {spacing:.3e}, \
         sampling rule requires at most {max_spacing:.3e}"
    )]
    Undersampled {
        axis: usize,
        spacing: f64,
        max_spacing: f64,
    },

    #[error("empty restriction: no grid node lies in the region")]
    EmptyRestriction,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("ratio denominator is zero")]
    ZeroDenominator,

    #[error("asymptotic invalid here: {0}")]
    AsymptoticInvalid(String),

    #[error("method {method} is not available for family {family}")]
    MethodUnavailable { family: String, method: String },

    #[error("fit needs at least 3 points, got {0}")]
    TooFewPoints(usize),

    #[error("fit needs strictly positive values, got ({0}, {1})")]
    NonPositive(f64, f64),

    #[error("at N = {n}: {source}")]
    AtSweepValue {
        n: f64,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

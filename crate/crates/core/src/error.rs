use thiserror::Error;

/// Errors raised while building or probing a truncated model.
#[derive(Debug, Error)]
pub enum Error {
    #[error("Fock space dimension {dim} exceeds the configured bound {bound}")]
    DimensionOverflow { dim: usize, bound: usize },

    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: String, reason: String },

    #[error("test function was built on a grid of {expected} modes but the space has {found}")]
    MismatchedGrid { expected: usize, found: usize },

    #[error("mode index {index} out of range for a grid of {count} modes")]
    ModeOutOfRange { index: usize, count: usize },

    #[error("generator pair {pair} violates the {wedge} support constraint: {detail}")]
    SupportViolation {
        pair: usize,
        wedge: &'static str,
        detail: String,
    },

    #[error(
        "quadrature budget exceeded: error bound {bound:.3e} above {target:.3e} with {nodes} nodes"
    )]
    QuadratureBudget {
        bound: f64,
        target: f64,
        nodes: usize,
    },

    #[error("limit did not converge: {0}")]
    NonConvergence(String),

    #[error("no dictionary element reproduces the target vector (residual {residual:.3e})")]
    ApproximantFailure { residual: f64 },

    #[error("deformed scattering paths disagree by {distance:.3e} (tolerance {tolerance:.3e})")]
    PathDisagreement { distance: f64, tolerance: f64 },

    #[error("reference vector is not cyclic for the algebra (rank {rank} of {dim})")]
    NotCyclic { rank: usize, dim: usize },

    #[error("reference vector is not separating for the algebra (commutant rank {rank} of {dim})")]
    NotSeparating { rank: usize, dim: usize },

    #[error("construction check failed: {0}")]
    Construction(String),

    #[error("config error at `{path}`: {reason}")]
    Config { path: String, reason: String },

    #[error("spectral cache: {0}")]
    Cache(String),

    #[error("stale spectral cache entry: file describes {found}, requested {expected}")]
    StaleCache { expected: String, found: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

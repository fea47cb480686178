use thiserror::Error;

/// Errors produced by the toolkit.
///
/// Validation failures and resource-guard refusals are kept apart so that
/// front ends can map them to different exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid spin value `{0}`")]
    InvalidSpin(String),
    #[error("projection {m} is not admissible for spin {spin}")]
    InvalidProjection { spin: String, m: String },
    #[error("direction has norm {norm}, expected a unit vector")]
    NotUnitVector { norm: f64 },
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("invalid protocol: {0}")]
    InvalidProtocol(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("resource guard: {0}")]
    ResourceGuard(String),
    #[error("bound not applicable: {0}")]
    NotApplicable(String),
    #[error("sample count is infinite because the spectral gap vanishes")]
    InfiniteSampleCount,
    #[error("iteration did not converge: {0}")]
    NoConvergence(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True when the request was refused because it exceeds a size limit.
    pub fn is_resource_guard(&self) -> bool {
        matches!(self, Error::ResourceGuard(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;

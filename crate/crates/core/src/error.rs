use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("restriction leaves an empty domain: {0}")]
    EmptyRestriction(String),

    #[error("system `{0}` provides no local extension rule")]
    NotExtendable(String),

    #[error("integration failed at t = {t}: {reason}")]
    IntegrationFailure { t: f64, reason: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("window has no bounding box, so it is not compact")]
    NotCompactWindow,

    #[error("precondition failed: {0}")]
    PreconditionFailed(String),

    #[error("source/target mismatch: {0}")]
    SourceTargetMismatch(String),

    #[error("defining identity violated at t = {t}, x = {x:?} (residual {residual:e})")]
    IdentityViolation { t: f64, x: Vec<f64>, residual: f64 },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

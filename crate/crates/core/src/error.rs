use thiserror::Error;

/// Errors raised by the numerical library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("trajectory window too short: need radius {needed}, have {available}")]
    WindowTooShort { needed: usize, available: usize },

    #[error("unsupported order k = {k}: {reason}")]
    UnsupportedOrder { k: usize, reason: &'static str },

    #[error("null tensor verification failed (radial {radial:e}, transverse {transverse:e})")]
    NullVerification { radial: f64, transverse: f64 },

    #[error("too few samples for a growth fit ({0} < 8)")]
    TooFewSamples(usize),

    #[error("instability at t = {t}: {reason}")]
    Instability { t: f64, reason: String },

    #[error("boundary contamination at t = {t}: max |u| = {value:e} within two cells of the boundary")]
    BoundaryContact { t: f64, value: f64 },

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("sample time mismatch: {left} s vs {right} s")]
    SampleTimeMismatch { left: f64, right: f64 },

    #[error("non-causal result: net delay would be {0} samples")]
    NonCausal(i64),

    #[error("integrating plant (pole at z = {pole}), DC gain undefined")]
    IntegratingPlant { pole: f64 },

    #[error("no dominant first-order mode: no real pole in (0, 1)")]
    NoDominantMode,

    #[error("frequency {frequency} Hz outside (0, {nyquist}] Hz")]
    FrequencyOutOfRange { frequency: f64, nyquist: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("observer gain leaves discretized error dynamics unstable (spectral radius {0})")]
    UnstableObserver(f64),

    #[error("quaternion is not unit norm (|q| = {0})")]
    NonUnitQuaternion(f64),

    #[error("tilt angle {angle} rad exceeds limit {limit} rad")]
    TiltLimit { angle: f64, limit: f64 },

    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    #[error("sequence length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("input sequence is identically zero")]
    ZeroInput,

    #[error("rank-deficient least-squares problem")]
    RankDeficient,

    #[error("no coherent frequency bins available for fitting")]
    EmptyCoherentSet,

    #[error("simulation diverged at t = {time} s: {reason}")]
    Diverged { time: f64, reason: String },

    #[error("{path}: {message}")]
    Config { path: PathBuf, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn config(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            message: message.into(),
        }
    }
}

pub(crate) fn ensure_finite(value: f64, what: &'static str) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFinite(what))
    }
}

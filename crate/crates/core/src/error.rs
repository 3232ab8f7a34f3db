use std::io;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate aircraft state: speed {speed} m/s, flight path angle {gamma} rad")]
    DegenerateState { speed: f64, gamma: f64 },

    #[error("time step must be positive and finite, got {0}")]
    InvalidTimeStep(f64),

    #[error("horizon {horizon} s is not a positive integer multiple of dt {dt} s")]
    HorizonNotMultiple { horizon: f64, dt: f64 },

    #[error("action list is empty")]
    EmptyActions,

    #[error("every candidate action led to a degenerate state")]
    NoViableAction,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("engagement already terminated at step {0}")]
    Terminated(u64),

    #[error("no trials to aggregate")]
    EmptyTrials,

    #[error("trial {0} has a team with zero initial aircraft")]
    ZeroInitialCount(usize),

    #[error("no decision timing samples recorded")]
    NoTimingData,

    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("scenario file: {0}")]
    Toml(#[from] toml::de::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

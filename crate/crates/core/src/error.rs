use thiserror::Error;

/// Errors surfaced by the spaces, models, noise and solver layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid spectral basis: {0}")]
    InvalidBasis(String),

    #[error("non-finite value in {context}")]
    NonFinite { context: String },

    #[error("non-finite state at step {step}")]
    NonFiniteState { step: usize },

    #[error("time {t} is not a grid point")]
    OffGrid { t: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid Levy measure: {0}")]
    InvalidMeasure(String),

    #[error("condition (H3) violated: {constant} = {value} but L_2,L_5 must lie in [0,2)")]
    H3Violation { constant: &'static str, value: f64 },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("Picard iteration did not converge on window starting at t={window_start} after {retries} window halvings")]
    PicardNonConvergence { window_start: f64, retries: usize },

    #[error("inner h-iteration did not converge within {max_inner} passes")]
    InnerNonConvergence { max_inner: usize },

    #[error("blow-up: accumulated integral of ||u||^2 reached {accumulated} at t={t} (ceiling {ceiling})")]
    BlowUp { t: f64, accumulated: f64, ceiling: f64 },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("unsupported parameterization: {0}")]
    Unsupported(String),

    #[error("time {time} is outside the horizon [0, {horizon}]")]
    TimeOutOfRange { time: f64, horizon: f64 },

    #[error("walk position overflowed i64 at step {step}")]
    PositionOverflow { step: usize },

    #[error("degenerate sample: {0}")]
    DegenerateSample(String),

    #[error("grid mismatch: {0}")]
    Grid(String),

    #[error("feasibility violated: H = {h} not in branch {branch} of the feasible table for beta = {beta}")]
    Infeasible { h: f64, beta: f64, branch: &'static str },
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

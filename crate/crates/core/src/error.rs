use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid degree distribution: {0}")]
    InvalidPolynomial(String),

    #[error("degree distribution has no edges (p'(1) = 0)")]
    DegenerateDistribution,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("cannot slide past the last window configuration c = {last}")]
    ScheduleExhausted { last: usize },

    #[error("window configuration {c} has not completed its {expected} iterations (t = {t})")]
    WindowIncomplete { c: usize, t: usize, expected: usize },

    #[error("no stable fixed point on the bracket [{lo}, {hi}]")]
    MissingFixedPoint { lo: f64, hi: f64 },

    #[error("trajectory is missing window configuration {0}")]
    MissingWindow(usize),

    #[error("degenerate denominator {0:e}: profile is flat")]
    DegenerateDenominator(f64),

    #[error("landscape is missing critical point {0}")]
    MissingCriticalPoint(&'static str),

    #[error("did not converge after {iterations} iterations (last step {last_step:e})")]
    NoConvergence { iterations: usize, last_step: f64 },
}

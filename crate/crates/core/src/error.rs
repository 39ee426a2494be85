use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("probability space must contain at least one outcome")]
    EmptySpace,
    #[error("probability of outcome {index} is {value}, must be strictly positive")]
    NonPositiveProbability { index: usize, value: f64 },
    #[error("probabilities sum to {sum}, expected 1 within 1e-12")]
    ProbabilitiesDoNotSumToOne { sum: f64 },
    #[error("value at outcome {index} is not finite")]
    NonFiniteValue { index: usize },
    #[error("object defined on {found} outcomes, expected {expected}")]
    SpaceMismatch { expected: usize, found: usize },
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("invalid filtration: {0}")]
    InvalidFiltration(String),
    #[error("unknown atom id {0}")]
    UnknownAtom(usize),
    #[error("confidence level {0} is outside (0, 1)")]
    AlphaOutOfRange(f64),
    #[error("invalid function family: {0}")]
    InvalidFamily(String),
    #[error("score function is not integrable on [{lo}, {hi}]")]
    ScoreNotIntegrable { lo: f64, hi: f64 },
    #[error("score integral vanishes on the {side} unit interval")]
    DegenerateScore { side: &'static str },
    #[error("bracket [{lo}, {hi}] does not enclose a sign change (g(lo) = {g_lo}, g(hi) = {g_hi})")]
    BracketFailure { lo: f64, hi: f64, g_lo: f64, g_hi: f64 },
    #[error("bisection did not converge within {0} iterations")]
    MaxIterExceeded(usize),
    #[error("capital variable is not measurable with respect to the partition")]
    NotMeasurable,
    #[error("instance too large for exhaustive search: {0}")]
    InstanceTooLarge(String),
    #[error("numeric overflow: {0}")]
    NumericOverflow(String),
    #[error("loss function has no second derivative at zero")]
    MissingSecondDerivative,
    #[error("invalid solver settings: {0}")]
    InvalidSettings(String),
}

impl Error {
    /// True for errors caused by malformed inputs rather than solver failure.
    pub fn is_validation(&self) -> bool {
        !matches!(
            self,
            Error::BracketFailure { .. }
                | Error::MaxIterExceeded(_)
                | Error::NumericOverflow(_)
                | Error::ScoreNotIntegrable { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

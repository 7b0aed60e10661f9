use thiserror::Error;

/// Errors raised by the analysis, dynamics and simulation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("payoff {name} must be a finite real, got {value}")]
    NonFinitePayoff { name: &'static str, value: f64 },

    #[error("{name} must lie in [0, 1], got {value}")]
    InvalidProbability { name: &'static str, value: f64 },

    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },

    #[error("{name} must be non-negative, got {value}")]
    Negative { name: &'static str, value: f64 },

    #[error("{0}")]
    InvalidArgument(String),

    #[error("unknown strategy name `{0}` (expected AllC, AllD, TFT or Pavlov)")]
    UnknownStrategy(String),

    #[error("invalid genome `{0}`: expected 5 characters over {{C, D}}")]
    InvalidGenome(String),

    #[error("threshold undefined: denominator vanishes at f_c = {f_c}")]
    UndefinedThreshold { f_c: f64 },

    #[error("no mixed equilibrium: the payoff matrix is additive (d = 0)")]
    AdditiveMatrix,

    #[error("equilibrium frequency undefined at r = 1 (division by zero)")]
    FullRelatedness,

    #[error("integration left the unit square at t = {t} (excursion {excursion:e})")]
    StepInstability { t: f64, excursion: f64 },

    #[error("failed to write output: {0}")]
    Output(String),

    #[error("shifted fitness must be positive: shift {shift} is too small, it must exceed {required}")]
    NonPositiveFitness { shift: f64, required: f64 },
}

impl Error {
    /// True for failures of the numerics rather than of the caller's input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::UndefinedThreshold { .. }
                | Error::FullRelatedness
                | Error::StepInstability { .. }
        )
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Output(e.to_string())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Output(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_probability(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(Error::InvalidProbability { name, value })
    }
}

use thiserror::Error;

use crate::characteristics::CharacteristicTrace;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Validation(String),

    #[error("radicand is negative ({radicand:e}) at {at}")]
    Domain { radicand: f64, at: f64 },

    #[error("denominator vanishes at {at}")]
    ZeroDenominator { at: f64 },

    #[error("no pair of quartic roots brackets the seed value {seed}")]
    NoBracketingRoots { seed: f64 },

    /// The step size collapsed before the horizon. The partial trace, when
    /// available, runs up to the failure point and is a suspected breaking.
    #[error("step size underflow at theta = {theta}")]
    StepSizeUnderflow {
        theta: f64,
        partial: Option<Box<CharacteristicTrace>>,
    },

    #[error("step budget of {0} exhausted")]
    TooManySteps(usize),

    #[error("coefficient pole: P1 crosses zero near theta = {theta}")]
    PoleCrossing { theta: f64 },

    #[error("CFL violation: courant number {courant} exceeds {limit}")]
    CflViolation { courant: f64, limit: f64 },

    #[error("characteristics cover only {coverage:.4} of the domain")]
    InsufficientCoverage { coverage: f64 },

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    /// Errors caused by numerical failure rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::StepSizeUnderflow { .. }
                | Error::TooManySteps(_)
                | Error::PoleCrossing { .. }
                | Error::ZeroDenominator { .. }
                | Error::CflViolation { .. }
                | Error::InsufficientCoverage { .. }
        )
    }
}

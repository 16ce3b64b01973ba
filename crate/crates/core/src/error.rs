use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied value violates a precondition.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Real-frequency evaluation exactly on a transition with zero broadening.
    #[error("pole at omega = {omega} rad/s: real-frequency evaluation on a transition needs a nonzero broadening")]
    Pole { omega: f64 },

    /// The operation is not defined for this atom or reflector.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Adaptive quadrature ran out of budget before meeting its tolerance.
    #[error("quadrature did not converge: value {value:e}, error estimate {abs_error_estimate:e} after {evaluations} evaluations")]
    NotConverged {
        value: f64,
        abs_error_estimate: f64,
        evaluations: usize,
    },

    /// The integrand produced NaN or infinity.
    #[error("integrand is not finite at x = {x:e}")]
    NonFiniteIntegrand { x: f64 },

    /// Scenario or atom file could not be parsed or validated.
    #[error("configuration error: {0}")]
    Config(String),

    /// A physics check on computed output did not hold.
    #[error("check failed: {0}")]
    CheckFailed(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures of the numerics (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NotConverged { .. } | Error::NonFiniteIntegrand { .. }
        )
    }
}

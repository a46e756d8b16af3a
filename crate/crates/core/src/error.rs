use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {what} (got {value})")]
    Domain { what: &'static str, value: f64 },

    #[error("{operation} is not available for the {family} family")]
    UnsupportedFamily { operation: &'static str, family: &'static str },

    #[error("quadrature did not converge after {subdivisions} subdivisions (estimate {estimate}, error {error})")]
    NonConvergence { subdivisions: usize, estimate: f64, error: f64 },

    #[error("integrand returned a non-finite value {value} at x = {x}")]
    NonFiniteIntegrand { x: f64, value: f64 },

    #[error("density has an asymptote at {at}")]
    Asymptote { at: f64 },

    #[error("probability underflow: {what}")]
    Underflow { what: &'static str },

    #[error("chain diverged at iteration {iteration}: {parameter} = {value}")]
    Diverged { iteration: usize, parameter: String, value: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("malformed draw store: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures of the numerics (divergence, non-convergence,
    /// underflow) as opposed to bad input.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence { .. }
                | Error::NonFiniteIntegrand { .. }
                | Error::Underflow { .. }
                | Error::Diverged { .. }
        )
    }
}

pub(crate) fn domain(what: &'static str, value: f64) -> Error {
    Error::Domain { what, value }
}

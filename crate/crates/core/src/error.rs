use thiserror::Error;

/// Errors raised by the numerical and sampling routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Adaptive quadrature ran out of subdivisions before meeting its tolerance.
    #[error("quadrature did not converge (estimate {estimate:e}, error bound {error_bound:e})")]
    Convergence { estimate: f64, error_bound: f64 },

    /// A nearest-point query was made against an empty pattern.
    #[error("no platform available for association")]
    NoCoverage,

    /// Transmitter and receiver share the same location.
    #[error("transmitter and receiver coincide")]
    DegeneratePair,
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

/// Fails with a domain error unless `value` is finite and satisfies `ok`.
pub(crate) fn check(name: &str, value: f64, ok: bool, requirement: &str) -> Result<()> {
    if value.is_finite() && ok {
        Ok(())
    } else {
        Err(domain(format!("{name} = {value} ({requirement})")))
    }
}

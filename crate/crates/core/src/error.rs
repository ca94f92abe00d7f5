use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid group element: location {l}, scale {s} (need finite location and finite scale > 0)")]
    InvalidElement { l: f64, s: f64 },

    #[error("unknown family `{0}` (valid: cauchy, normal, halfnormal, exponential, laplace)")]
    UnknownFamily(String),

    #[error("unknown generator `{0}` (valid: kl, reverse-kl, hellinger2, tv, chi2)")]
    UnknownGenerator(String),

    #[error("malformed density spec `{0}` (expected <family>:<loc>,<scale>)")]
    BadSpec(String),

    #[error("invalid quadrature config: {0}")]
    BadConfig(String),

    #[error("integrand returned NaN at x = {0}")]
    NanIntegrand(f64),

    #[error("precondition violated: {0}")]
    Precondition(String),
}

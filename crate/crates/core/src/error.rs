use thiserror::Error;

/// Errors raised by the dynamics laboratory.
#[derive(Debug, Error)]
pub enum Error {
    #[error("map spec schema violation: {0}")]
    Schema(String),

    #[error("zero leading coefficient in polynomial `{0}`")]
    ZeroLeadingCoefficient(&'static str),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("map is not polynomial-like on {0}")]
    NotPolynomialLike(String),

    #[error("fiber size {size} exceeds the cap of {cap} points")]
    CapExceeded { size: u128, cap: u64 },

    #[error("root finder failed to converge after {iterations} iterations (degree {degree})")]
    RootNonConvergence { degree: usize, iterations: usize },

    #[error("solve inconsistency: {0}")]
    SolveInconsistency(String),

    #[error("orbit left the domain: {0}")]
    Escaped(String),

    #[error("rejection acceptance rate {rate:.3e} below {threshold:.0e}: {context}")]
    LowAcceptance {
        rate: f64,
        threshold: f64,
        context: String,
    },

    #[error("{failed} of {total} {what} failed, above the allowed fraction {allowed}")]
    TooManyFailures {
        what: &'static str,
        failed: usize,
        total: usize,
        allowed: f64,
    },

    #[error("corrupted measure: {0}")]
    Corrupted(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed file: {0}")]
    Format(String),
}

impl Error {
    /// True for errors caused by inputs or configuration rather than numerics.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Schema(_)
                | Error::ZeroLeadingCoefficient(_)
                | Error::Unsupported(_)
                | Error::InvalidInput(_)
                | Error::NotPolynomialLike(_)
                | Error::CapExceeded { .. }
                | Error::Format(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

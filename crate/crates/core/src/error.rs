//! Error type shared by all modules.

use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    /// A denominator vanished; carries the name of the vanishing expression.
    #[error("division by zero: {0}")]
    DivisionByZero(String),

    /// An eps-rational value has a pole at eps = 0.
    #[error("pole at eps = 0 in {0}")]
    PoleAtZero(String),

    /// A series or infinite product failed to meet its tolerance within the term cap.
    #[error("non-convergent after {terms} terms (last bound {bound:.3e})")]
    NonConvergent { terms: usize, bound: f64 },

    /// Input outside the numeric domain (q, positivity, convergence conditions).
    #[error("domain error: {0}")]
    DomainError(String),

    /// The parameter constraint linking beta'_0 to beta_0 does not hold.
    #[error("constraint violated: {0}")]
    ConstraintViolated(String),

    /// Pole-avoiding sampler gave up.
    #[error("sampler exhausted after {0} rejections")]
    SamplerExhausted(usize),

    /// An eps-polynomial exceeded the degree cap after reduction.
    #[error("eps-degree cap exceeded: degree {degree} > cap {cap}")]
    DegreeCapExceeded { degree: usize, cap: usize },

    /// Invalid suite configuration.
    #[error("config error: {0}")]
    ConfigError(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

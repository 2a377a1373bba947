use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degree {degree} exceeds configured maximum {max}")]
    DegreeOutOfRange { degree: usize, max: usize },
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("kernel singular at statistic {0}")]
    Singular(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("non-finite integrand at {0}")]
    Evaluation(String),
    #[error("resource limit exceeded: {0}")]
    Resource(String),
}

pub(crate) fn arg<S: Into<String>>(msg: S) -> Error {
    Error::Argument(msg.into())
}

use thiserror::Error;

/// Library-wide error type.
///
/// `Input` covers validation failures of arguments and configurations;
/// `Numerical` covers runtime failures of the numerical machinery (norm
/// drift, singular pivots, eigensolver non-convergence); `Convention`
/// covers operations applied to a matrix in the wrong hermiticity mode.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("input error: {0}")]
    Input(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("convention error: {0}")]
    Convention(String),
}

impl Error {
    pub fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }

    pub fn convention(msg: impl Into<String>) -> Self {
        Error::Convention(msg.into())
    }
}

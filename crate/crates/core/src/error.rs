use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    /// A construction parameter violates a named constraint.
    #[error("parameter `{name}` violates constraint: {constraint}")]
    Parameter { name: String, constraint: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("empty family: {0}")]
    EmptyFamily(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub fn param(name: impl Into<String>, constraint: impl Into<String>) -> Self {
        Error::Parameter {
            name: name.into(),
            constraint: constraint.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

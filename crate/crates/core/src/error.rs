use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("{what}: size {size} exceeds limit {limit}")]
    Resource {
        what: &'static str,
        size: usize,
        limit: usize,
    },

    #[error("neighbourhood of vertex {vertex} has {size} vertices, limit {limit}")]
    NeighborhoodTooLarge { vertex: usize, size: usize, limit: usize },

    #[error("load error: {0}")]
    Load(String),

    #[error("growth profile error: {0}")]
    Profile(String),

    #[error("precondition violated: {0}")]
    Precondition(String),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }
}

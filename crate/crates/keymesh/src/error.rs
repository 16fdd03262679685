use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("node {node} is out of range for a network of {n} nodes")]
    NodeOutOfRange { node: u32, n: u32 },

    #[error("operation requires two distinct nodes, got {0} twice")]
    SameNode(u32),

    #[error("nodes {a} and {b} do not share a key edge")]
    NotAnEdge { a: u32, b: u32 },

    #[error("hop-count bound is only defined for power-of-two networks of at least 8 nodes, got {0}")]
    BoundUndefined(u32),

    #[error("requested {requested} edges but a simple graph on {n} nodes holds at most {max}")]
    TooManyEdges { n: u32, requested: usize, max: usize },

    #[error("message plaintext must not be empty")]
    EmptyPlaintext,

    #[error("authentication failed at hop {hop}")]
    AuthenticationFailure { hop: usize },
}

impl Error {
    /// True for errors caused by bad parameters rather than runtime failures.
    pub fn is_usage(&self) -> bool {
        !matches!(self, Error::AuthenticationFailure { .. })
    }
}

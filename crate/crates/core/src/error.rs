use thiserror::Error;

/// Errors produced by the library. Each variant maps to a stable
/// category (see [`Error::kind`]) that the CLI turns into an exit code.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("newick syntax error at byte {position}: {message}")]
    Syntax { position: usize, message: String },

    #[error("duplicate leaf label {0:?}")]
    DuplicateLabel(String),

    #[error("non-binary tree: node {node} would have unrooted degree {degree}")]
    NonBinary { node: String, degree: usize },

    #[error("tree needs at least {min} leaves, got {got}")]
    TooFewLeaves { min: usize, got: usize },

    #[error("malformed tree: {0}")]
    Malformed(String),

    #[error("leaf association error: {0}")]
    Association(String),

    #[error("leaf counts differ: {0} vs {1}")]
    LeafCountMismatch(usize, usize),

    #[error("{what} = {value} exceeds the enumeration cap of {cap} leaves")]
    CapExceeded { what: &'static str, value: usize, cap: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// Coarse error category, stable across releases.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Parse,
    Association,
    Parameter,
    Cap,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Syntax { .. }
            | Error::DuplicateLabel(_)
            | Error::NonBinary { .. }
            | Error::Malformed(_) => ErrorKind::Parse,
            Error::Association(_) | Error::LeafCountMismatch(..) => ErrorKind::Association,
            Error::CapExceeded { .. } => ErrorKind::Cap,
            Error::TooFewLeaves { .. } | Error::InvalidParameter(_) => ErrorKind::Parameter,
        }
    }

    pub(crate) fn syntax(position: usize, message: impl Into<String>) -> Self {
        Error::Syntax {
            position,
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

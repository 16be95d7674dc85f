use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },

    /// A validation failure raised while reading a named file.
    #[error("{}: {source}", path.display())]
    File { path: PathBuf, source: Box<Error> },

    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },

    /// A semantic failure attached to the record at `line`.
    #[error("line {line}: {source}")]
    Record { line: usize, source: Box<Error> },

    #[error("unknown relation label `{0}`")]
    UnknownLabel(String),

    #[error("duplicate instance id `{0}`")]
    DuplicateId(String),

    #[error("unknown instance id `{0}`")]
    UnknownId(String),

    #[error("invalid label space: {0}")]
    LabelSpace(String),

    #[error("invalid manifest: {0}")]
    Manifest(String),

    #[error("matrix file: {0}")]
    Matrix(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("zero-norm vector")]
    ZeroNorm,

    #[error("nearest-neighbour corpus is empty")]
    EmptyCorpus,

    #[error("no embedding for instance `{0}`")]
    MissingEmbedding(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("infeasible synthetic geometry: {0}")]
    Infeasible(String),
}

impl Error {
    pub(crate) fn io(path: &Path, source: io::Error) -> Self {
        Error::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub(crate) fn in_file(self, path: &Path) -> Self {
        match self {
            e @ (Error::Io { .. } | Error::File { .. }) => e,
            e => Error::File {
                path: path.to_path_buf(),
                source: Box::new(e),
            },
        }
    }

    /// The innermost error, with file and record context stripped.
    pub fn root(&self) -> &Error {
        match self {
            Error::File { source, .. } | Error::Record { source, .. } => source.root(),
            e => e,
        }
    }

    /// True when the root cause is an operating-system I/O failure rather
    /// than rejected content.
    pub fn is_io(&self) -> bool {
        match self {
            Error::Io { .. } => true,
            Error::File { source, .. } => source.is_io(),
            _ => false,
        }
    }
}

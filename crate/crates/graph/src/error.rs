use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("{0}: no edges found")]
    Empty(PathBuf),
    #[error("vertex id {id} does not fit into 32 bits")]
    IdOverflow { id: u64 },
    #[error("{path}: not a graph cache file ({reason})")]
    BadCache { path: PathBuf, reason: String },
    #[error("root vertex {root} out of range for graph with {n} vertices")]
    RootOutOfRange { root: u32, n: usize },
    #[error("cannot pick roots from an empty vertex set")]
    NoVertices,
    #[error("invalid problem specification: {0}")]
    InvalidSpec(String),
    #[error("{bits}-bit value overflow: distance {distance} does not fit below the unreached sentinel")]
    ValueOverflow { bits: u8, distance: u64 },
}

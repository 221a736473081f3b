use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("graph is not decomposable")]
    NotDecomposable,
    #[error("unknown vertex {vertex} (graph has {count} vertices)")]
    UnknownVertex { vertex: usize, count: usize },
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("invalid move proposal: {0}")]
    InvalidProposal(String),
    #[error("parameter out of range: {0}")]
    ParamOutOfRange(String),
    #[error("invalid data: {0}")]
    InvalidData(String),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

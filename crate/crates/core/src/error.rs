use thiserror::Error;

/// Everything that can go wrong while ingesting a graph or running one of
/// the analyses on it.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: duplicate edge {src} -> {dst}")]
    DuplicateEdge { line: usize, src: String, dst: String },

    #[error("line {line}: weight `{weight}` must be a positive number")]
    BadWeight { line: usize, weight: String },

    #[error("vertex {vertex} has no incoming edges and no dangling policy was given")]
    DanglingVertex { vertex: String },

    #[error("graph is not weakly connected ({components} weak components)")]
    WeaklyDisconnected { components: usize },

    #[error("vertex set does not induce a strongly connected subgraph")]
    NotStronglyConnected,

    #[error("linear system is singular")]
    SingularSystem,

    #[error("vertex {vertex} has zero in-degree but lies in the support of a kernel vector")]
    ZeroDegree { vertex: String },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("requested tolerance {tol:e} cannot be reached")]
    ToleranceUnreachable { tol: f64 },

    #[error("no convergence after {iterations} iterations")]
    MaxIterExceeded { iterations: usize },

    #[error("alpha must be a positive finite number")]
    BadAlpha,

    #[error("beta must lie strictly between 0 and 1")]
    BadBeta,

    #[error("matrix kind {kind} conflicts with dangling policy {policy}")]
    PolicyConflict { kind: &'static str, policy: &'static str },

    #[error("reach decomposition does not match the matrix: {0}")]
    DecompositionMismatch(String),

    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

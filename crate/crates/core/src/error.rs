use thiserror::Error;

/// Errors produced by the bound computation pipeline.
#[derive(Debug, Error)]
pub enum QmstError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("graph needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),

    #[error("invalid vertex {vertex} (graph has {n} vertices)")]
    InvalidVertex { vertex: usize, n: usize },

    #[error("invalid edge index {edge} (graph has {m} edges)")]
    InvalidEdge { edge: usize, m: usize },

    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),

    #[error("duplicate edge {{{0}, {1}}}")]
    DuplicateEdge(usize, usize),

    #[error("graph is not connected")]
    Disconnected,

    #[error("expected {expected} edges, got {got}")]
    WrongEdgeCount { expected: usize, got: usize },

    #[error("matrix has support outside the edge set at ({0}, {1})")]
    SupportOutsideEdges(usize, usize),

    #[error("vertex set is not independent: {0} and {1} are adjacent")]
    NotIndependent(usize, usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("eigendecomposition failed")]
    Eigen,

    #[error("LP solver failed: {0}")]
    Lp(String),

    #[error("instance too large for enumeration: n = {n} > {max}")]
    TooLarge { n: usize, max: usize },

    #[error("could not generate a connected graph after {0} attempts")]
    GenerationFailed(usize),

    #[error("parse error at line {line}, column {column}: {msg}")]
    Parse {
        line: usize,
        column: usize,
        msg: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, QmstError>;

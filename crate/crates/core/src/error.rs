use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid size: {0}")]
    InvalidSize(String),
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("graph has no edges")]
    EmptyEdgeSet,
    #[error("graph is not regular")]
    NotRegular,
    #[error("graph is not connected")]
    NotConnected,
    #[error("regular degree {0} is below 2")]
    DegreeTooSmall(usize),
    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("eigensolver did not converge after {0} sweeps")]
    NoConvergence(usize),
    #[error("kernel basis has {found} vectors, expected {expected}")]
    KernelDimension { expected: usize, found: usize },
    #[error("root eigenvalue -r = {0} cannot enter the X-family of a bipartite root")]
    BipartiteExclusion(f64),
    #[error("index {index} out of range (len {len})")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("root bracketing failed: {0}")]
    Bracket(String),
    #[error("method assumption violated: {0}")]
    Assumption(String),
    #[error("adjacency mismatch between {0} and {1}")]
    AdjacencyMismatch(String, String),
    #[error("need at least {needed} data points, got {found}")]
    InsufficientData { needed: usize, found: usize },
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

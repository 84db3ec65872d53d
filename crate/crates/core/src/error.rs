use thiserror::Error;

/// Errors surfaced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("edge {edge:?} has {found} entries, expected k = {expected}")]
    EdgeArity {
        edge: Vec<usize>,
        expected: usize,
        found: usize,
    },

    #[error("vertex {vertex} out of range for n = {n}")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("edge {edge:?} repeats a vertex but loops are not allowed")]
    LoopForbidden { edge: Vec<usize> },

    #[error("residue set must be nonempty")]
    EmptyResidues,

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("arity mismatch: expected {expected}, found {found}")]
    ArityMismatch { expected: usize, found: usize },

    #[error("dimension mismatch: {0}")]
    DimMismatch(String),

    #[error("{what} = {needed} exceeds cap {cap}")]
    CapExceeded {
        what: String,
        needed: usize,
        cap: usize,
    },

    #[error("hypergraph is not {0}-linear")]
    NotPiLinear(String),

    #[error("matrix is not symmetric: max |a_ij - a_ji| = {0:.3e}")]
    NotSymmetric(f64),

    #[error("eigensolver did not converge within {0} sweeps")]
    NoConvergence(usize),

    #[error("trace rounding residual {0:.3e} exceeds tolerance; numerical failure")]
    RoundingResidual(f64),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

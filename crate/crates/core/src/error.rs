use thiserror::Error;

/// Errors raised while constructing states or computing correlation measures.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("subsystem dimensions {dims:?} do not multiply to {len}")]
    DimsMismatch { dims: Vec<usize>, len: usize },

    #[error("ket norm deviates from 1 by {0:.3e}")]
    NotNormalized(f64),

    #[error("matrix is not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("trace deviates from 1 by {0:.3e}")]
    TraceNotOne(f64),

    #[error("matrix is not positive semidefinite (min eigenvalue {0:.3e})")]
    NotPositive(f64),

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("invalid subsystem index set {indices:?} for {count} subsystems")]
    InvalidSubsystems { indices: Vec<usize>, count: usize },

    #[error("state is not bipartite: {0} subsystem factors")]
    NotBipartite(usize),

    #[error("rank {rank} out of range for dimension {dim}")]
    RankOutOfRange { rank: usize, dim: usize },

    #[error("operator basis requires dimension >= 2, got {0}")]
    BasisDimTooSmall(usize),

    #[error("expected lambda matrix of kind {expected}, got {got}")]
    WrongLambdaKind { expected: &'static str, got: &'static str },

    #[error("measurement outcome {0} is not rank one (trace {1:.3e})")]
    NotRankOne(usize, f64),

    #[error("projectors are not a complete orthogonal set (deviation {0:.3e})")]
    InvalidProjectors(f64),

    #[error("expected {expected} measurement parameters, got {got}")]
    BadParameterCount { expected: usize, got: usize },

    #[error("candidate basis is not compatible with the invariant eigenspace blocks")]
    IncompatibleBasis,

    #[error("marginal state is degenerate; the bound is not defined")]
    DegenerateMarginal,

    #[error("total dimension {dim} exceeds the supported cap {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("unknown builtin state `{0}`")]
    UnknownBuiltin(String),

    #[error("invalid optimizer configuration: {0}")]
    BadConfig(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension cap exceeded: {dim} > {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("not a bipartition side: {0}")]
    NotBipartitionSide(String),

    #[error("operator is not Hermitian (residual {residual:e})")]
    NotHermitian { residual: f64 },

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal mass {off:e})")]
    EigenNotConverged { sweeps: usize, off: f64 },

    #[error("eigendecomposition reconstruction residual {residual:e} exceeds {bound:e}")]
    EigenResidual { residual: f64, bound: f64 },

    #[error("invalid slot structure: {0}")]
    InvalidSlots(String),

    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("party set mismatch: {0} vs {1} parties")]
    PartySetMismatch(usize, usize),

    #[error("partition enumeration limited to {limit} parties, got {m}")]
    PartitionGuard { m: usize, limit: usize },

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("no coarser bipartition exists for the trivial partition")]
    NoCoarserBipartition,

    #[error("invalid ensemble: {0}")]
    InvalidEnsemble(String),

    #[error("degenerate class {class}: zero probability, cannot normalize")]
    DegenerateClass { class: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("ensemble does not satisfy the hiding condition: {0}")]
    Inadmissible(String),

    #[error("schema violation: {0}")]
    Schema(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

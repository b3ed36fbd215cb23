use thiserror::Error;

/// Errors raised by the library layer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoherenceError {
    #[error("state vector is empty or identically zero")]
    ZeroVector,
    #[error("state is not normalized: norm = {norm}")]
    NotNormalized { norm: f64 },
    #[error("dimension must be at least 2, got {0}")]
    DimensionTooSmall(usize),
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not Hermitian at entry ({row}, {col})")]
    NotHermitian { row: usize, col: usize },
    #[error("trace must be 1, got {0}")]
    BadTrace(f64),
    #[error("matrix is not positive semidefinite: smallest eigenvalue {0}")]
    NotPositive(f64),
    #[error("Jacobi eigensolver did not converge after {0} sweeps")]
    NoConvergence(usize),
    #[error("not a permutation of 0..{0}")]
    NotAPermutation(usize),
    #[error("Kraus operators are not trace preserving (deviation {0:e})")]
    KrausNotTracePreserving(f64),
    #[error("channel is not incoherent: Kraus operator {0} creates coherence")]
    ChannelNotIncoherent(usize),
    #[error("polynomial is invalid: {0}")]
    InvalidPolynomial(String),
    #[error("polynomial is constant after trimming")]
    ConstantPolynomial,
    #[error("root finder did not converge after {0} iterations")]
    RootFindingDiverged(usize),
    #[error("states are parallel (|overlap| = {0})")]
    StatesParallel(f64),
    #[error("overlap K = {k} outside the admissible range [{min}, 1]")]
    KOutOfRange { k: f64, min: f64 },
    #[error("exact twirl limited to d <= {max}, got {dim}")]
    DimensionTooLargeForExact { dim: usize, max: usize },
    #[error("matrix does not have orthonormal columns (deviation {0:e})")]
    NotAnIsometry(f64),
    #[error("decomposition size {size} is smaller than rank {rank}")]
    RankDeficientSpectrumMismatch { size: usize, rank: usize },
    #[error("probability vectors have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("invalid probability vector: {0}")]
    InvalidProbabilities(String),
    #[error("state is not certified transformable by majorization")]
    NotTransformable,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, CoherenceError>;

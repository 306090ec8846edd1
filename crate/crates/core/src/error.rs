use thiserror::Error;

/// Errors raised by construction and domain checks across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix rows do not form a square {expected}x{expected} matrix")]
    NotSquare { expected: usize },

    #[error("matrix is not Hermitian: max |M[j][k] - conj(M[k][j])| = {max_deviation:.3e}")]
    NotHermitian { max_deviation: f64 },

    #[error("matrix is not positive semidefinite: min eigenvalue {min_eigenvalue:.3e}")]
    NotPsd { min_eigenvalue: f64 },

    #[error("effect {index} is not positive semidefinite: min eigenvalue {min_eigenvalue:.3e}")]
    EffectNotPsd { index: usize, min_eigenvalue: f64 },

    #[error("effects do not sum to the identity: max entry deviation {max_deviation:.3e}")]
    Incomplete { max_deviation: f64 },

    #[error("a POVM needs at least one effect")]
    EmptyPovm,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimMismatch { expected: usize, found: usize },

    #[error("expected {expected} labels, found {found}")]
    LabelCount { expected: usize, found: usize },

    #[error("trace must be 1, found {trace}")]
    TraceNotOne { trace: f64 },

    #[error("matrix is not unitary: max |U\u{2020}U - I| entry = {max_deviation:.3e}")]
    NotUnitary { max_deviation: f64 },

    #[error("mixing parameter must lie in [0, 1], found {value}")]
    ParameterOutOfRange { value: f64 },

    #[error("invalid partition: {reason}")]
    BadPartition { reason: String },

    #[error("outcome index {index} out of range for {n} outcomes")]
    OutcomeOutOfRange { index: usize, n: usize },

    #[error("operation requires a qubit observable (d = 2), found d = {dim}")]
    NotQubit { dim: usize },

    #[error("shot count must be at least 1")]
    NoShots,

    #[error("trial count must be at least 1")]
    NoTrials,

    #[error("scan needs at least one outcome count, each at least 1")]
    BadOutcomeCounts,

    #[error("grid resolution must be at least 2, found {resolution}")]
    BadResolution { resolution: usize },

    #[error("need 0 <= omega2 <= omega1 <= 1, found omega1 = {omega1}, omega2 = {omega2}")]
    OmegaOrdering { omega1: f64, omega2: f64 },

    #[error("effect sum is numerically singular; cannot normalize the sampled POVM")]
    SingularEffectSum,

    #[error("matrix entries must be finite (NaN/Inf rejected)")]
    NonFiniteEntry,

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

use alloc::string::String;

use thiserror::Error;

/// Errors raised by the coherence toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix has {found} entries, expected {expected}")]
    BadShape { expected: usize, found: usize },

    #[error("matrix contains a non-finite entry")]
    NonFinite,

    #[error("matrix is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),

    #[error("matrix is not positive semidefinite (min eigenvalue {0:e})")]
    NotPsd(f64),

    #[error("trace is not 1 (got {0})")]
    InvalidTrace(f64),

    #[error("state vector is not normalized (norm^2 = {0})")]
    NotNormalized(f64),

    #[error("invalid probability distribution: {0}")]
    InvalidDistribution(String),

    #[error("argument out of range: {0}")]
    OutOfRange(String),

    #[error("Kraus operators are not trace non-increasing")]
    NotTraceNonIncreasing,

    #[error("Kraus list is empty")]
    EmptyKraus,

    #[error("mixing matrix does not preserve the channel (Choi distance {0:e})")]
    NotPartialIsometry(f64),

    #[error("map is not a Schur map with 0 <= A_ii <= 1")]
    NotSgi,

    #[error("map is not genuinely incoherent")]
    NotGi,

    #[error("Kraus representation is not incoherent")]
    NotIncoherentRepresentation,

    #[error("Hamiltonian has degenerate energies")]
    DegenerateHamiltonian,

    #[error("inconsistent pinning at entry ({0}, {1})")]
    InconsistentPinning(usize, usize),

    #[error("parameter constraints violated (residual {0:e})")]
    ConstraintViolation(f64),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("dimension {0} is too large for exhaustive search")]
    TooLarge(usize),
}

pub type Result<T> = core::result::Result<T, Error>;

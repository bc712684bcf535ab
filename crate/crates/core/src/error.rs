use alloc::string::String;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: String, found: String },

    #[error("matrix contains a non-finite entry")]
    NonFinite,

    #[error("zero vector has no rank-one projector")]
    ZeroVector,

    #[error("matrix is not Hermitian (defect {defect:e})")]
    NotHermitian { defect: f64 },

    #[error("matrix is not unitary (defect {defect:e})")]
    NotUnitary { defect: f64 },

    #[error("map is not Hermiticity-preserving (defect {defect:e})")]
    NotHermiticityPreserving { defect: f64 },

    #[error("map is not bistochastic (unit defect {unit_defect:e}, trace defect {trace_defect:e})")]
    NotBistochastic { unit_defect: f64, trace_defect: f64 },

    #[error("subspace basis is not HS-orthonormal (defect {defect:e})")]
    NotOrthonormal { defect: f64 },

    #[error("subspace does not contain the identity (residual {residual:e})")]
    MissingIdentity { residual: f64 },

    #[error("subspace is not a Jordan *-subalgebra: {reason}")]
    NotJordanSubalgebra { reason: String },

    #[error("stable subspace failed post-verification: {diagnostic}")]
    StableVerification { diagnostic: String },

    #[error("witness has no negative eigenvalue (min {min_eigenvalue:e})")]
    NoNegativeEigenvalue { min_eigenvalue: f64 },

    #[error("constructed state is not detected: Tr(W rho) = {value:e}")]
    DetectionFailed { value: f64 },

    #[error("not a density matrix: {reason}")]
    NotDensityMatrix { reason: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = core::result::Result<T, Error>;

use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian within tolerance")]
    NotHermitian,
    #[error("matrix is not normal within tolerance")]
    NotNormal,
    #[error("numerical failure: {0}")]
    NumericalFailure(&'static str),
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(&'static str),
    #[error("entry data length {found} does not match shape ({expected} expected)")]
    BadEntryCount { expected: usize, found: usize },
    #[error("non-finite entry")]
    NonFinite,
    #[error("real-tagged value has a nonzero imaginary part")]
    ImaginaryInReal,
    #[error("a real-field value was required")]
    RealRequired,
    #[error("zero vector is not allowed")]
    ZeroVector,
    #[error("frame must contain at least one vector")]
    EmptyFrame,
    #[error("tolerance must be positive and finite")]
    InvalidTolerance,
    #[error("system is not a frame")]
    NotAFrame,
    #[error("transport operator is singular")]
    SingularTransport,
    #[error("sample set does not match the system's index lattice")]
    IndexMismatch,
    #[error("index {index} out of range (bound {bound})")]
    IndexOutOfRange { index: usize, bound: usize },
    #[error("frame does not match a basis-extension template")]
    TemplateMismatch,
    #[error("companion coefficients are all zero")]
    AllZeroCoefficients,
    #[error("a + d must be nonzero")]
    DegenerateTrace,
    #[error("harmonic frame needs k >= n")]
    KTooSmall,
    #[error("parameters violate the scalability criterion")]
    CriterionFailed,
    #[error("invalid system: {0}")]
    InvalidSpec(&'static str),
}

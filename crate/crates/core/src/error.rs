use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Sum of two radicals with different square-free radicands.
    #[error("sum of incompatible radicals: sqrt({0}) + sqrt({1})")]
    NonClosedSum(String, String),

    #[error("negative radicand {0}")]
    NegativeRadicand(String),

    #[error("value {0} is not exactly representable as a single radical")]
    NotExact(String),

    #[error("exact verification requested on floating-point operators")]
    FloatNotSupported,

    #[error("psi_{m}({nu}) is zero or undefined")]
    PsiUndefined { m: i64, nu: String },

    #[error("a psi-custom family requires a psi handle")]
    MissingPsi,

    #[error("only psi-custom families accept a psi handle")]
    UnexpectedPsi,

    #[error("nu = {0} is a reducibility point")]
    AtReducibilityPoint(String),

    #[error("window bound {bound} too small (need at least {needed})")]
    WindowTooSmall { bound: i64, needed: i64 },

    #[error("casimir does not act by a scalar (weight {weight})")]
    CasimirMismatch { weight: i64 },

    #[error("nu = {0} is off the hermitian locus (real or imaginary axis)")]
    NotHermitianLocus(String),

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("S(nu) is singular at nu = 0")]
    SingularAtZero,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("output error: {0}")]
    Io(String),
}

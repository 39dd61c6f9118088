use thiserror::Error;

/// Errors produced anywhere in the scheme.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("operands use different moduli")]
    ModulusMismatch,

    #[error("invalid modulus: {0}")]
    InvalidModulus(String),

    /// The target vector is not in the row span. Callers in the LSSS layer
    /// translate this into [`Error::Unauthorized`].
    #[error("target lies outside the row span")]
    NoSolution,

    #[error("gaussian parameter {got} is below the required {required}")]
    GaussianTooSmall { got: f64, required: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("sampler gave up after {0} rejections")]
    SamplerExhausted(u64),

    #[error("not a lattice basis: {0}")]
    NotABasis(String),

    #[error("matrix is rank deficient")]
    RankDeficient,

    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("policy not satisfied")]
    Unauthorized,

    #[error("attribute {0:?} is reserved or empty")]
    ReservedAttribute(String),

    #[error("parameter constraints unsatisfiable: {0}")]
    Unsatisfiable(String),

    #[error("malformed encoding: {0}")]
    Malformed(String),

    #[error("ciphertext has no component for attribute {0:?}")]
    MissingComponent(String),

    #[error("payload of {0} bytes exceeds the 65536 byte limit")]
    PayloadTooLarge(usize),
}

pub type Result<T> = std::result::Result<T, Error>;

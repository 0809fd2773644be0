use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("field modulus {modulus} outside the supported range [3, 2^31)")]
    ModulusRange { modulus: u64 },

    #[error("value {value} is not a canonical element of GF({modulus})")]
    NonCanonical { value: u64, modulus: u32 },

    #[error("division by zero")]
    DivisionByZero,

    #[error("singular system: rank {rank} of {size}")]
    Singular { rank: usize, size: usize },

    #[error("inconsistent system: {0}")]
    Inconsistent(String),

    #[error("field GF({modulus}) too small: need more than {needed} elements")]
    FieldTooSmall { modulus: u32, needed: u64 },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("out of range: {0}")]
    OutOfRange(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("{what} = {value} exceeds the guard of {limit}")]
    GuardExceeded { what: &'static str, value: u64, limit: u64 },

    #[error("unsupported repair pattern: {0}")]
    UnsupportedPattern(String),

    #[error("{erased} erasures exceed the MDS radius r = {r}")]
    BeyondMdsRadius { erased: usize, r: usize },

    #[error("node {0} has failed")]
    NodeFailed(usize),

    #[error("node {0} is already failed")]
    AlreadyFailed(usize),

    #[error("repair needs exactly 2 failed nodes, found {0}")]
    WrongFailureCount(usize),

    #[error("helper {node} was asked for coordinate {index} outside its access set")]
    AccessViolation { node: usize, index: u64 },

    #[error("shard format: {0}")]
    Format(String),

    #[error("internal error: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn internal(msg: impl Into<String>) -> Self {
        Error::Internal(msg.into())
    }
}

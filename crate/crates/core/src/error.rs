use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    InvalidPrime(u64),

    #[error("invalid partition {0:?}: parts must be positive and weakly decreasing")]
    InvalidPartition(Vec<u32>),

    #[error("groups live over different primes ({left} vs {right})")]
    PrimeMismatch { left: u64, right: u64 },

    #[error("precision p^{precision} cannot resolve {target}; need at least p^{required}")]
    PrecisionTooLow {
        target: String,
        precision: u32,
        required: u32,
    },

    #[error("modulus {p}^{k} does not fit the matrix arithmetic")]
    ModulusTooLarge { p: u64, k: u32 },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("invalid sampler: {0}")]
    InvalidSampler(String),

    #[error("invalid experiment plan: {0}")]
    InvalidPlan(String),

    #[error("enumeration guard exceeded: {0}")]
    GuardExceeded(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("lattice mismatch: {0}")]
    LatticeMismatch(String),

    #[error("missing lattice cell {0}")]
    MissingCell(String),

    #[error("distribution has support outside the lattice at {0}")]
    OutsideLattice(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid group: {0}")]
    InvalidGroup(String),

    #[error("subgroup is not normal in {0}")]
    NotNormal(String),
}

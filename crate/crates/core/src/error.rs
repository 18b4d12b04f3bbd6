use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("derivative order {0} is not supported (expected 1 or 2)")]
    UnsupportedOrder(u32),

    #[error("harmonic k = {k} is not allowed by the {parity} parity mask")]
    ParityViolation { k: usize, parity: &'static str },

    #[error("harmonic k = {k} exceeds truncation order {k_max}")]
    HarmonicOutOfRange { k: usize, k_max: usize },

    #[error("normalization undefined: |a_1| = {0:e} is below threshold")]
    NormalizationUndefined(f64),

    #[error("invalid potential exponent alpha = {0} (need alpha < 2 and alpha != 0)")]
    InvalidExponent(f64),

    #[error("invalid period {0} (must be positive and finite)")]
    InvalidPeriod(f64),

    #[error("m = {m} masses per loop forces simultaneous collisions between loops; m has to be odd")]
    CollisionParity { m: usize },

    #[error("masses per loop must be at least 1")]
    ZeroMultiplicity,

    #[error("mass {0} is not positive")]
    NonPositiveMass(f64),

    #[error("parameter layout does not match the orbit model")]
    LayoutMismatch,

    #[error("invalid reduction: {0}")]
    InvalidReduction(String),

    #[error("collision between bodies {i} and {j} at t = {t:.6} (separation {distance:e})")]
    Collision {
        i: usize,
        j: usize,
        t: f64,
        distance: f64,
    },

    #[error("non-finite state at t = {0}")]
    NonFinite(f64),

    #[error("quadrature grid with {n} nodes is too coarse for k_max = {k_max} (need at least {min})")]
    GridTooCoarse { n: usize, k_max: usize, min: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("io error: {0}")]
    Io(String),

    #[error("malformed record at byte {offset} (line {line}, column {column}): {message}")]
    Parse {
        offset: usize,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("unsupported record schema version {found} (this build reads version {expected})")]
    SchemaVersion { found: u32, expected: u32 },

    #[error("invalid record: {0}")]
    InvalidRecord(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

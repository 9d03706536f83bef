use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure the library can report. Variant names are stable: the CLI
/// prints them verbatim on the diagnostic stream.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("operands belong to different fields (q={left} vs q={right})")]
    ModulusMismatch { left: u64, right: u64 },
    #[error("division by zero in GF(q)")]
    DivisionByZero,
    #[error("modulus {0} is not a prime below 2^63")]
    NotPrime(u64),
    #[error("interpolation needs at least one point")]
    EmptyPointSet,
    #[error("two interpolation points share abscissa {0}")]
    DuplicateAbscissa(u64),
    #[error("{got} shares supplied, {needed} required")]
    InsufficientShares { needed: usize, got: usize },
    #[error("two shares belong to the same owner {0}")]
    DuplicateOwner(u64),
    #[error("share degree {got} does not match expected degree {expected}")]
    DegreeMismatch { expected: usize, got: usize },
    #[error("recovered coefficient matrix is not symmetric")]
    AsymmetricResult,
    #[error("ID width {width} bits does not fit below the field modulus ({limit} bits available)")]
    IdWidthExceedsField { width: u32, limit: u32 },
    #[error("value out of range: {0}")]
    OutOfRange(String),
    #[error("order {order} outside 1..={max}")]
    OrderOutOfRange { order: u32, max: u32 },
    #[error("node IDs belong to different grids")]
    GridMismatch,
    #[error("a node cannot establish a key with itself")]
    SameNode,
    #[error("pair needs order {needed} but rings retain orders up to {retained}")]
    OrderTruncated { needed: u32, retained: u32 },
    #[error("order {order} polynomial is not shared by the two nodes")]
    PolynomialNotShared { order: u32 },
    #[error("the pair shares a retained polynomial; no relay needed")]
    DirectKeyAvailable,
    #[error("no relay node shares a retained polynomial with both endpoints")]
    NoRelayExists,
    #[error("parameter outside its domain: {0}")]
    ParamDomain(String),
    #[error("zone {zone} outside 0..{zones}")]
    ZoneOutOfRange { zone: u64, zones: u64 },
    #[error("malformed deployment document: {0}")]
    Format(String),
}

impl Error {
    /// Short variant name, e.g. `SameNode`.
    pub fn name(&self) -> &'static str {
        match self {
            Error::ModulusMismatch { .. } => "ModulusMismatch",
            Error::DivisionByZero => "DivisionByZero",
            Error::NotPrime(_) => "NotPrime",
            Error::EmptyPointSet => "EmptyPointSet",
            Error::DuplicateAbscissa(_) => "DuplicateAbscissa",
            Error::InsufficientShares { .. } => "InsufficientShares",
            Error::DuplicateOwner(_) => "DuplicateOwner",
            Error::DegreeMismatch { .. } => "DegreeMismatch",
            Error::AsymmetricResult => "AsymmetricResult",
            Error::IdWidthExceedsField { .. } => "IdWidthExceedsField",
            Error::OutOfRange(_) => "OutOfRange",
            Error::OrderOutOfRange { .. } => "OrderOutOfRange",
            Error::GridMismatch => "GridMismatch",
            Error::SameNode => "SameNode",
            Error::OrderTruncated { .. } => "OrderTruncated",
            Error::PolynomialNotShared { .. } => "PolynomialNotShared",
            Error::DirectKeyAvailable => "DirectKeyAvailable",
            Error::NoRelayExists => "NoRelayExists",
            Error::ParamDomain(_) => "ParamDomain",
            Error::ZoneOutOfRange { .. } => "ZoneOutOfRange",
            Error::Format(_) => "Format",
        }
    }
}

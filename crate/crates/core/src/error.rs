use thiserror::Error;

/// Errors raised by the engine. Variant names are stable: the CLI prints
/// them verbatim on stderr.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("leading coefficient is not a unit (+1 or -1)")]
    NonUnitLeading,
    #[error("infinite product does not converge q-adically: {0}")]
    DivergentProduct(String),
    #[error("theta series needs a positive quadratic coefficient, got {0}")]
    IndefiniteTheta(String),
    #[error("series known only below q^{available}, requested q^{requested}")]
    InsufficientOrder { requested: String, available: String },
    #[error("exponent {exp} is not a multiple of 1/{grain}")]
    OffGrain { exp: String, grain: u64 },
    #[error("exponent {0} lies at or beyond the truncation order")]
    OutOfRange(String),
    #[error("invalid series data: {0}")]
    InvalidSeries(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid rank {rank} for family {family}")]
    InvalidRank { family: char, rank: u32 },
    #[error("matrix is singular")]
    Singular,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("A*D is not symmetric")]
    NotSymmetric,
    #[error("A*D is not positive definite")]
    NotPositiveDefinite,
    #[error("invalid character label: {0}")]
    InvalidLabel(String),
    #[error("sector does not match the parity of r-s: {0}")]
    SectorParityMismatch(String),
    #[error("index {index} out of range 1..={len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("Nahm equation iteration did not converge after {iterations} steps (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("argument outside the domain: {0}")]
    DomainError(String),
    #[error("not enough data for the fit: {0}")]
    InsufficientData(String),
    #[error("unknown identity id {0}")]
    UnknownIdentity(String),
    #[error("integer overflow in the enumeration bound")]
    Overflow,
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Variant name, used as the machine-readable error tag.
    pub fn name(&self) -> &'static str {
        match self {
            Error::NonUnitLeading => "NonUnitLeading",
            Error::DivergentProduct(_) => "DivergentProduct",
            Error::IndefiniteTheta(_) => "IndefiniteTheta",
            Error::InsufficientOrder { .. } => "InsufficientOrder",
            Error::OffGrain { .. } => "OffGrain",
            Error::OutOfRange(_) => "OutOfRange",
            Error::InvalidSeries(_) => "InvalidSeries",
            Error::InvalidArgument(_) => "InvalidArgument",
            Error::InvalidRank { .. } => "InvalidRank",
            Error::Singular => "Singular",
            Error::DimensionMismatch(_) => "DimensionMismatch",
            Error::NotSymmetric => "NotSymmetric",
            Error::NotPositiveDefinite => "NotPositiveDefinite",
            Error::InvalidLabel(_) => "InvalidLabel",
            Error::SectorParityMismatch(_) => "SectorParityMismatch",
            Error::IndexOutOfRange { .. } => "IndexOutOfRange",
            Error::NoConvergence { .. } => "NoConvergence",
            Error::DomainError(_) => "DomainError",
            Error::InsufficientData(_) => "InsufficientData",
            Error::UnknownIdentity(_) => "UnknownIdentity",
            Error::Overflow => "Overflow",
            Error::Parse(_) => "Parse",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

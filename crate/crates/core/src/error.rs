use thiserror::Error;

/// Which part of a Newton-polygon step needed a larger field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtensionReason {
    /// A segment slope is not an integer number of pi-units.
    Slope,
    /// A residual polynomial has no root in the residue field.
    Residual,
    /// An algebraic input (e.g. a root of theta) is not in the working field.
    Embedding,
}

impl std::fmt::Display for ExtensionReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ExtensionReason::Slope => "slope",
            ExtensionReason::Residual => "residual",
            ExtensionReason::Embedding => "embedding",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid field configuration: {0}")]
    InvalidConfig(String),

    #[error("incompatible field configurations")]
    ConfigMismatch,

    #[error("division by an element that is zero at its precision")]
    DivisionByIndistinguishableZero,

    #[error("not a q^{power}-th power in the working field (exponent {exponent} not divisible); supply the sigma-image explicitly")]
    NotAQthPower { power: i64, exponent: i64 },

    #[error("series is not a unit in the Tate algebra at available precision")]
    NotAUnit,

    #[error("evaluation point has |a| > 1")]
    OutsideUnitDisk,

    #[error("cannot certify evaluation: {0}")]
    InsufficientTruncation(String),

    #[error("argument outside the logarithm domain: valuation {valuation} must exceed {bound}")]
    OutsideLogDomain { valuation: i64, bound: i64 },

    #[error("valuation cannot be determined at available precision")]
    IndeterminateValuation,

    #[error("field extension required ({0})")]
    ExtensionRequired(ExtensionReason),

    #[error("matrix is not invertible in the supported ring")]
    NonInvertible,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("linear system has fewer rows ({rows}) than unknowns ({cols})")]
    UnderdeterminedSystem { rows: usize, cols: usize },

    #[error("relation is not certified")]
    NotCertified,

    #[error("cannot extract F_q(t) defining polynomial: {0}")]
    GammaExtractionFailed(String),

    #[error("syntax error at {position}: {message}")]
    Syntax { position: usize, message: String },

    #[error("`{0}` is not allowed in this context")]
    Context(String),

    #[error("malformed input: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;

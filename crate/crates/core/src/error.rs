use thiserror::Error;

/// Errors raised by the decomposition, feature and clustering pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("empty model")]
    EmptyModel,

    #[error("invalid region spec: {0}")]
    InvalidRegionSpec(String),

    #[error("need at least {needed} samples, got {got}")]
    InsufficientLength { needed: usize, got: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("ragged ensemble: series {series} has {got} samples, expected {expected}")]
    RaggedEnsemble {
        series: usize,
        expected: usize,
        got: usize,
    },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("zero data")]
    ZeroData,

    #[error("truncation beyond numerical rank: requested {requested}, numerical rank {available}")]
    TruncationBeyondRank { requested: usize, available: usize },

    #[error("defective reduced operator (eigenvector condition number {condition:.3e})")]
    DefectiveOperator { condition: f64 },

    #[error("zero eigenvalue cannot be inverted")]
    ZeroEigenvalue,

    #[error("degenerate mode")]
    DegenerateMode,

    #[error("degenerate spectrum, match undefined")]
    DegenerateSpectrum,

    #[error("premises unmet: {0}")]
    PremisesUnmet(String),

    #[error("linear algebra failure: {0}")]
    Numerical(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// True for failures of the numerics on otherwise well-formed input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::ZeroData
                | Error::TruncationBeyondRank { .. }
                | Error::DefectiveOperator { .. }
                | Error::ZeroEigenvalue
                | Error::DegenerateMode
                | Error::DegenerateSpectrum
                | Error::PremisesUnmet(_)
                | Error::Numerical(_)
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

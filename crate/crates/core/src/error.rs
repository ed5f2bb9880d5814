use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("permutation is not admissible: {0}")]
    NotAdmissible(String),
    #[error("top and bottom rows end with the same letter")]
    RowsEndEqual,
    #[error("paths are not composable")]
    NotComposable,
    #[error("trivial path not allowed here")]
    TrivialPath,
    #[error("invalid letter pair: {0}")]
    InvalidPair(String),
    #[error("invalid color set: {0}")]
    ImproperColors(String),
    #[error("path is not colored inside the decorated class")]
    NotColored,
    #[error("algorithm stopped at step {step}: the transformation has a connection")]
    AlgorithmStopped { step: usize },
    #[error("float precision exhausted at step {step}")]
    PrecisionExhausted { step: usize },
    #[error("operation requires the exact backend")]
    FloatBackend,
    #[error("triple is a connection")]
    Connection,
    #[error("point outside the domain")]
    OutOfDomain,
    #[error("triple not detected within {horizon} steps")]
    NotDetected { horizon: usize },
    #[error("budget exhausted: {0}")]
    Budget(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("level {level} is out of range for d = {d}")]
    LevelOutOfRange { level: usize, d: usize },
    #[error("bit string {0} is not a codeword of this encoding")]
    InvalidCodeword(String),
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("qubit count mismatch: {left} vs {right}")]
    QubitCountMismatch { left: usize, right: usize },
    #[error("shift by {offset} of a {width}-qubit operator overflows a {total}-qubit register")]
    ShiftOverflow {
        offset: usize,
        width: usize,
        total: usize,
    },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid encoding: {0}")]
    InvalidEncoding(String),
    #[error("unknown operator '{0}'")]
    UnknownOperator(String),
    #[error("spin must be a positive half-integer, got {0}")]
    InvalidSpin(f64),
    #[error("operator is not Hermitian")]
    NotHermitian,
    #[error("Pauli coefficient must be real, got {re} + {im}i")]
    ComplexCoefficient { re: f64, im: f64 },
    #[error("{what} needs {n} qubits, above the cap of {cap}")]
    SizeCap {
        what: &'static str,
        n: usize,
        cap: usize,
    },
    #[error("truncation augmentation refused: {0}")]
    AugmentationRefused(String),
    #[error("Hamming distance {d_h} exceeds bitmask union size {k}")]
    InvalidBoundQuery { d_h: usize, k: usize },
    #[error("invalid gate: {0}")]
    InvalidGate(String),
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

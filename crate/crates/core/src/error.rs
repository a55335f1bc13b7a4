use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("coordinate out of range: {0}")]
    OutOfRange(String),
    #[error("not a permutation: {0}")]
    InvalidPermutation(String),
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("invalid size: {0}")]
    InvalidSize(String),
    #[error("gate {gate} acts on non-adjacent cells {a:?} and {b:?}")]
    NotAdjacent {
        gate: &'static str,
        a: (usize, usize),
        b: (usize, usize),
    },
    #[error("qubit {0:?} used twice in one layer")]
    LayerConflict((usize, usize)),
    #[error("gate {0} is outside the supported class")]
    UnsupportedGate(String),
    #[error("state too large: {0} qubits")]
    TooManyQubits(usize),
    #[error("stage moves items across lines: {0}")]
    CrossLine(String),
    #[error("routing left its container: {0}")]
    Routing(String),
    #[error("malformed input: {0}")]
    Parse(String),
}

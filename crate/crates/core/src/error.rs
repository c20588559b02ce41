use thiserror::Error;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("no exact decoder for lattice `{0}`")]
    NoExactDecoder(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("singular matrix")]
    Singular,
    #[error("integer overflow in exact matrix arithmetic")]
    Overflow,
    #[error("search radius {radius} is below the covering radius {covering}")]
    RadiusTooSmall { radius: f64, covering: f64 },
    #[error("no lattice point found within radius {0}")]
    NoCandidate(f64),
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),
    #[error("lattices are not nested: {0}")]
    NotNested(String),
    #[error("infeasible shaping target: {0}")]
    Infeasible(String),
    #[error("sequence does not have the matcher's composition")]
    CompositionViolation,
    #[error("sequence index is outside the {0}-bit input range")]
    IndexOutOfRange(usize),
    #[error("sequence energy {energy} exceeds the bound {max}")]
    EnergyViolation { energy: u64, max: u64 },
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("unknown code: rate {rate}, length {length}")]
    UnknownCode { rate: String, length: usize },
    #[error("invalid SNR {0} dB")]
    InvalidSnr(f64),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("records do not bracket BER {target:e}; nearest points: {nearest}")]
    NoBracket { target: f64, nearest: String },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

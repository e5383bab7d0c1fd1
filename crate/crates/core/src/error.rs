use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty input")]
    EmptyInput,

    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("degenerate sample: {0}")]
    DegenerateSample(String),

    #[error("value {value} outside support [1..{n}]")]
    OutOfSupport { value: usize, n: usize },

    #[error("empty support (n = 0)")]
    EmptySupport,

    #[error("parameter out of domain: {0}")]
    Domain(String),

    #[error("argument out of range: {0}")]
    Range(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("negative rectangle mass {value:e} at cell ({i}, {j})")]
    NegativeMass { i: usize, j: usize, value: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("index {index} out of range for {size} {what}")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        size: usize,
    },
    #[error("operator is not Hermitian: coefficient of {word} has imaginary part {imag:e}")]
    NonHermitian { word: String, imag: f64 },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{n_qubits} qubits exceeds the dense oracle limit of {limit}")]
    SizeLimit { n_qubits: usize, limit: usize },
    #[error("register mismatch: expected {expected} qubits, got {got}")]
    WireMismatch { expected: usize, got: usize },
    #[error("Pauli gadget needs a non-empty word")]
    EmptyWord,
    #[error("ancilla wire {0} collides with the system register")]
    AncillaCollision(usize),
    #[error("overlap row has {got} entries, {needed} required")]
    RowTooShort { needed: usize, got: usize },
    #[error("no overlap eigenvalue above threshold {0:e}")]
    NoIndependentStates(f64),
    #[error("missing matrix: {0}")]
    MissingMatrix(&'static str),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("all {0} optimizer restarts diverged")]
    AllRestartsFailed(usize),
    #[error("config {field}: {message}")]
    Config { field: String, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

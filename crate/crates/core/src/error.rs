use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit position {qubit} out of range for a {size}-qubit register")]
    QubitOutOfRange { qubit: usize, size: usize },

    #[error("two-qubit gate addresses position {0} twice")]
    DuplicateTarget(usize),

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("register of {requested} qubits exceeds the cap of {cap}")]
    RegisterCap { requested: usize, cap: usize },

    #[error("qubit at position {0} is not in a computational basis state and cannot be detached")]
    EntangledDetach(usize),

    #[error("measurement branch with zero norm on qubit {0}")]
    DegenerateBranch(usize),

    #[error("configuration count {count} exceeds the cap of {cap}")]
    ConfigurationOverflow { count: u128, cap: u128 },

    #[error("invalid error environment: {0}")]
    InvalidEnvironment(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit index {index} out of range for a {num_qubits}-qubit register")]
    IndexOutOfRange { index: usize, num_qubits: usize },

    #[error("qubit indices must be distinct (got {0} twice)")]
    DuplicateQubit(usize),

    #[error("matrix is not unitary (deviation {deviation:.3e})")]
    NonUnitary { deviation: f64 },

    #[error("matrix is not Hermitian (deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("subset to keep is empty")]
    EmptySubset,

    #[error("subset to keep covers the full register")]
    FullSet,

    #[error("amplitude vector of length {0} is not a power of two")]
    BadLength(usize),

    #[error("state is not normalized (norm^2 = {0})")]
    NotNormalized(f64),

    #[error("{requested} qubits exceeds the desk-scale cap of {cap}")]
    TooManyQubits { requested: usize, cap: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unitary parameter {name} = {value} outside [0, pi/2]")]
    ParamOutOfRange { name: &'static str, value: f64 },

    #[error("no saturation found: flatness {eps:.1e} never reached over a window of width {window}")]
    NoSaturation { window: f64, eps: f64 },

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("malformed gate: {0}")]
    MalformedGate(String),

    #[error("unknown experiment `{0}`")]
    UnknownExperiment(String),

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

use thiserror::Error;

/// Errors raised by the simulator, graph construction and analysis routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum IspError {
    #[error("level count k must be at least 1")]
    ZeroLevels,

    #[error("register width n must be at least 1 (N = 2^n >= 2), got n = {0}")]
    InvalidWidth(u32),

    #[error("N = {0} is not a power of two >= 2")]
    NotPowerOfTwo(u64),

    #[error("level {level} out of range 1..={k}")]
    LevelOutOfRange { level: usize, k: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("labels {from} and {to} must differ in exactly one position")]
    NotAdjacent { from: String, to: String },

    #[error("label {label} has length {got}, expected {expected}")]
    LabelLength {
        label: String,
        expected: usize,
        got: usize,
    },

    #[error("cannot parse label {0:?}: expected a string over {{e, N}}")]
    BadLabel(String),

    #[error("edge requires a target label")]
    MissingTarget,

    #[error("edges at order {order} overlap on label {label}")]
    OverlappingLayer { order: u32, label: String },

    #[error("state norm {0} deviates from 1")]
    NotNormalized(f64),

    #[error("quaternion norm {0} deviates from 1 beyond 1e-9")]
    NonUnitQuaternion(f64),

    #[error(
        "invalid prefix length {prefix_len} for k = {k}: the cube needs at least one free position"
    )]
    InvalidPrefix { prefix_len: usize, k: usize },

    #[error("value {value} outside the admissible range {range}")]
    OutOfRange { value: f64, range: &'static str },

    #[error("sample stride must be at least 1")]
    ZeroStride,

    #[error("schedule requires k = {expected}, got k = {got}")]
    WrongLevelCount { expected: usize, got: usize },

    #[error("unknown operator name {0:?}")]
    UnknownOperator(String),

    #[error("base schedule fails validation: sink probability {probability} below threshold {threshold}")]
    UnvalidatedBase { probability: f64, threshold: f64 },

    #[error("constant search failed: {0}")]
    SearchFailure(String),

    #[error("statevector of {qubits} qubits exceeds the {limit}-qubit guard")]
    TooManyQubits { qubits: u32, limit: u32 },

    #[error("ancilla register is not in the zero state (residual {0:e})")]
    DirtyAncilla(f64),

    #[error("solution value {value} does not fit in a register of {n} qubits")]
    BadSolution { value: u64, n: u32 },

    #[error("sweep needs at least {min} points, got {got}")]
    TooFewPoints { min: usize, got: usize },

    #[error("json: {0}")]
    Json(String),
}

impl From<serde_json::Error> for IspError {
    fn from(e: serde_json::Error) -> Self {
        IspError::Json(e.to_string())
    }
}

pub type Result<T, E = IspError> = std::result::Result<T, E>;

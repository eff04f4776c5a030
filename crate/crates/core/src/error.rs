use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("duplicate qubit label `{0}`")]
    DuplicateLabel(String),

    #[error("unknown qubit label `{0}`")]
    UnknownLabel(String),

    #[error("amplitude count {found} does not match {qubits} qubit(s)")]
    AmplitudeCount { qubits: usize, found: usize },

    #[error("state is not normalized (squared norm {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },

    #[error("operator is not unitary (max deviation {deviation:e})")]
    NonUnitary { deviation: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("partial trace needs at least one kept label")]
    EmptyKeep,

    #[error("{what} out of range: {value}")]
    OutOfRange { what: &'static str, value: f64 },

    #[error("expected a {expected}-qubit state, found {found} qubit(s)")]
    WrongQubitCount { expected: usize, found: usize },

    #[error("concurrence-fill radicand is negative ({0:e})")]
    NegativeRadicand(f64),

    #[error("bit pattern {0:#04b} is not in the codebook")]
    UnknownBits(u8),

    #[error("concurrence fill {fill} has no success probability in [0, 1] for beta^2 = {beta_sq} (printed bounds [{lower}, {upper}])")]
    FillOutOfRange {
        fill: f64,
        beta_sq: f64,
        lower: f64,
        upper: f64,
    },

    #[error("invalid measurement basis: {0}")]
    InvalidBasis(String),

    #[error("{0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

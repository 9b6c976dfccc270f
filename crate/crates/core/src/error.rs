use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("non-finite entry in {0}")]
    NonFinite(&'static str),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("operator is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("mixing matrix is not unitary (max deviation {deviation:e})")]
    NotUnitary { deviation: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("trace drifted by {drift:e} at t = {time}; reduce dt")]
    TraceDrift { time: f64, drift: f64 },

    #[error("numerical blow-up at t = {time}; reduce dt")]
    NumericalBlowUp { time: f64 },

    #[error("total jump probability {probability} per step exceeds 0.1 at t = {time}; reduce dt")]
    StepTooLarge { time: f64, probability: f64 },

    #[error("snapshot grid does not resolve the drive period: {0}")]
    NonCommensurateGrid(String),

    #[error("singular linear system")]
    Singular,

    #[error("unsupported: {0}")]
    Unsupported(String),
}

use thiserror::Error;

/// Why a matrix was refused as a density matrix.
#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum Rejection {
    #[error("NonHermitian: max |M - M^dagger| = {deviation:e}")]
    NonHermitian { deviation: f64 },
    #[error("TraceNotOne: trace = {trace}")]
    TraceNotOne { trace: f64 },
    #[error("NegativeEigenvalue: min eigenvalue = {min:e}")]
    NegativeEigenvalue { min: f64 },
}

impl Rejection {
    /// Short machine-readable name of the rejection reason.
    pub fn reason(&self) -> &'static str {
        match self {
            Rejection::NonHermitian { .. } => "NonHermitian",
            Rejection::TraceNotOne { .. } => "TraceNotOne",
            Rejection::NegativeEigenvalue { .. } => "NegativeEigenvalue",
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NonHermitian(f64),

    #[error("invalid state: {0}")]
    InvalidState(#[from] Rejection),

    #[error("parameter `{name}` = {value} outside {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("state does not have the X sparsity pattern in any local frame")]
    NotXState,

    #[error("entropy constraint {0} is infeasible (must lie in [0, 2])")]
    ConstraintInfeasible(f64),

    #[error("zero-length measurement axis")]
    DegenerateAxis,

    #[error("internal consistency failure: {0}")]
    Consistency(String),

    #[error("malformed state file: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit status: 1 usage, 2 invalid state, 3 internal consistency.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NonHermitian(_) | Error::InvalidState(_) | Error::Parse(_) | Error::Json(_) => 2,
            Error::Consistency(_) => 3,
            Error::OutOfRange { .. }
            | Error::NotXState
            | Error::ConstraintInfeasible(_)
            | Error::DegenerateAxis
            | Error::Io(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

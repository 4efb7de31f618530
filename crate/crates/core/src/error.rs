use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("direction is not a unit vector (norm {0})")]
    NonUnitDirection(f64),

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("trace must be positive, got {0:e}")]
    NonPositiveTrace(f64),

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e}, trace {trace:e})")]
    NotPositive { min_eigenvalue: f64, trace: f64 },

    #[error("non-finite entry in input")]
    NonFinite,

    #[error("transform is not a proper orthochronous Lorentz transformation: {0}")]
    ImproperTransform(String),

    #[error("dominant energy condition violated: {0}")]
    DecViolation(String),

    #[error("could not complete Lorentz frame: {0}")]
    FrameCompletion(String),

    #[error("state is entangled (SEC margin {margin}), no separable decomposition exists")]
    Entangled { margin: f64 },

    #[error("input is not a state: {0}")]
    NotAState(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error: {0}")]
    Parse(String),
}

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// The interface crosses an element in a way the linear chord cannot represent.
    #[error("interface violates the two-point cut assumption on element {element}: {reason} (refine mesh)")]
    A1Violation { element: usize, reason: String },

    #[error("level set does not change sign on segment ({p0:?}) -> ({p1:?})")]
    NoSignChange { p0: [f64; 2], p1: [f64; 2] },

    #[error("local system on element {element} is singular (reciprocal condition {rcond:.3e})")]
    SingularSystem { element: usize, rcond: f64 },

    #[error("singular jacobian (det = {det:.3e})")]
    SingularJacobian { det: f64 },

    #[error("unsupported quadrature degree {0}")]
    UnsupportedDegree(usize),

    #[error("{what} index {index} out of range (len {len})")]
    IndexOutOfRange { what: &'static str, index: usize, len: usize },

    #[error("solver breakdown: {0}")]
    SolverBreakdown(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit status for the command-line driver.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::Config(_) | Error::UnsupportedDegree(_) => 2,
            Error::A1Violation { .. } | Error::NoSignChange { .. } => 3,
            Error::SolverBreakdown(_) | Error::SingularSystem { .. } | Error::SingularJacobian { .. } => 4,
            Error::IndexOutOfRange { .. } | Error::Io(_) => 1,
        }
    }
}

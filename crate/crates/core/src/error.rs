use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("mesh error: {0}")]
    Mesh(String),
    #[error("mesh quality target unreachable at element {element}: {detail}")]
    Quality { element: usize, detail: String },
    #[error("evaluation at the origin: {0}")]
    Origin(String),
    #[error("point ({0}, {1}) is outside the mesh")]
    OutsideMesh(f64, f64),
    #[error("no root of the corner exponent equation found for omega={0}")]
    NoRoot(f64),
    #[error("singular system: zero pivot at unknown {index}")]
    Singular { index: usize },
    #[error("solver did not reach tolerance {tol:e}; best relative residual {residual:e}")]
    NoConvergence { tol: f64, residual: f64 },
    #[error("time step {step} failed: {source}")]
    Step {
        step: usize,
        #[source]
        source: Box<Error>,
    },
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Errors that come from bad user input rather than a numerical failure.
    pub fn is_validation(&self) -> bool {
        matches!(self, Error::InvalidInput(_) | Error::Parse(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

use thiserror::Error;

/// Errors raised by the core library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    /// A field contained NaN or infinite samples.
    #[error("data integrity: non-finite values in {0}")]
    NonFinite(String),

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("invalid argument: {0}")]
    Argument(String),

    /// The stepper could not find an admissible time step.
    #[error("step failed at t={t}: {reason} (dt={dt}, max|u|={max_velocity})")]
    StepFailure {
        t: f64,
        dt: f64,
        max_velocity: f64,
        reason: String,
    },

    /// A marker left the central region where the periodic box is a faithful
    /// stand-in for the plane.
    #[error("marker {index} left the safe region at ({x}, {y})")]
    DomainTruncation { index: usize, x: f64, y: f64 },

    #[error("degenerate geometry: {0}")]
    Degenerate(String),

    #[error("malformed data: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn argument<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Argument(msg.into()))
}

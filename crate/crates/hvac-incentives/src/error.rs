use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("model error: {0}")]
    Model(String),
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("simulation diverged at step {step}")]
    Diverged { step: usize },
    #[error("sampling failed: {diverged} of {total} runs diverged")]
    SamplingFailed { diverged: usize, total: usize },
    #[error("degenerate work surface: density is constant over the feasible region")]
    DegenerateSurface,
    #[error("model shape: {0}")]
    Shape(String),
    #[error("point (S={s}, E={e}) is outside the feasible region")]
    Domain { s: f64, e: f64 },
    #[error("precondition: {0}")]
    Precondition(String),
    #[error("calibration: {0}")]
    Calibration(String),
    #[error("schema: {0}")]
    Schema(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

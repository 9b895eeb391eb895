use thiserror::Error;

/// Errors raised anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("numerical failure: {message} (achieved error {achieved:e})")]
    Numerical { message: String, achieved: f64 },

    #[error("quotient undefined: {0}")]
    UndefinedQuotient(String),

    #[error("step size underflow at r = {r:e}")]
    StepUnderflow { r: f64 },

    #[error("maximum step count {max_steps} exceeded at r = {r:e}")]
    MaxSteps { r: f64, max_steps: usize },

    #[error("right-hand side not finite at r = {r:e}")]
    RhsNotFinite { r: f64 },

    #[error("no sign change on [{a:e}, {b:e}]")]
    NoSignChange { a: f64, b: f64 },

    #[error("mass matrix is not positive definite (entry {index} = {value:e})")]
    IndefiniteMass { index: usize, value: f64 },

    #[error("shot from s = {s} left the admissible range near r = {r:e}")]
    SingularExcursion { s: f64, r: f64 },

    #[error("shot from s = {s} did not reach zero before r_max = {r_max:e}")]
    NoZero { s: f64, r_max: f64 },

    #[error("branch point s = {s} failed: {source}")]
    Branch {
        s: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

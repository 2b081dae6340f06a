use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// `|x_k|` fell below the degenerate-magnitude guard, leaving its argument undefined.
    #[error("degenerate magnitude at oscillator {index}: |x| = {modulus:e}")]
    DegenerateMagnitude { index: usize, modulus: f64 },

    #[error("phase unwrap ambiguous at oscillator {index}: per-step change {step:.4} rad (reduce dt)")]
    UnwrapAmbiguity { index: usize, step: f64 },

    #[error("non-finite state at t = {time}")]
    NonFinite { time: f64 },

    #[error("matrix exponential overflow during {stage}")]
    Overflow { stage: &'static str },

    #[error("eigensolver did not converge after {iterations} iterations")]
    Convergence { iterations: usize },

    #[error("singular matrix in linear solve")]
    Singular,

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid network: {0}")]
    InvalidNetwork(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("gain condition violated: margin {margin} <= 0")]
    NonpositiveMargin { margin: f64 },

    #[error("config error: {0}")]
    Config(String),

    #[error("acceptance assertion failed: {0}")]
    Acceptance(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code used by the command-line runner.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_)
            | Error::Parse { .. }
            | Error::InvalidNetwork(_)
            | Error::Precondition(_)
            | Error::LengthMismatch { .. } => 2,
            Error::DegenerateMagnitude { .. }
            | Error::UnwrapAmbiguity { .. }
            | Error::NonFinite { .. }
            | Error::Overflow { .. }
            | Error::Convergence { .. }
            | Error::Singular
            | Error::NonpositiveMargin { .. } => 3,
            Error::Acceptance(_) => 4,
            Error::Io { .. } => 1,
        }
    }
}

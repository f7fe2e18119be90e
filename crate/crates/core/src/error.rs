use thiserror::Error;

/// Errors raised across the analysis stack.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed call: dimension mismatch, out-of-range parameter.
    #[error("usage error: {0}")]
    Usage(String),
    /// A matrix or vector violates a structural requirement (skew-Hermitian, unitary, ...).
    #[error("domain error: {0}")]
    Domain(String),
    /// A mathematical precondition of a construction does not hold.
    #[error("precondition failed: {0}")]
    Precondition(String),
    /// Input file could not be parsed or violates the system invariants.
    #[error("input error: {0}")]
    Input(String),
    /// No certified bound can be produced.
    #[error("no certificate: {0}")]
    NoCertificate(String),
    /// A numerical routine failed to behave as guaranteed.
    #[error("internal numerical failure: {0}")]
    Internal(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    /// Adds the pipeline stage to an underlying error.
    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// Process exit code for the CLI: 2 for anything caused by the input, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Internal(_) => 3,
            Error::Stage { source, .. } => source.exit_code(),
            _ => 2,
        }
    }

    pub fn at_stage(self, stage: &'static str) -> Error {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error(transparent)]
    Core(#[from] requant_core::Error),
    #[error(transparent)]
    Pgm(#[from] crate::pgm::PgmError),
    #[error("invalid range `{input}`: {reason}")]
    Range { input: String, reason: &'static str },
    #[error("invalid value `{input}`: {reason}")]
    Value { input: String, reason: &'static str },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, LabError>;

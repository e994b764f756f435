use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("resource limit: {0}")]
    ResourceLimit(String),

    /// Estimation was attempted on a network without a single informative
    /// subnetwork. Plenty of links does not imply any informative wiring.
    #[error(
        "no information: {n_informative} informative subnetworks among {n_links} links"
    )]
    NoInformation { n_links: usize, n_informative: usize },

    #[error("identification failure: {0}")]
    IdentificationFailure(String),

    #[error("degenerate inference: {0}")]
    DegenerateInference(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("line {line}: duplicate triad ({i},{j},{k})")]
    DuplicateTriad { line: usize, i: u32, j: u32, k: u32 },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for failures caused by the data carrying too little information
    /// (as opposed to malformed input or bad arguments).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NoInformation { .. }
                | Error::IdentificationFailure(_)
                | Error::DegenerateInference(_)
                | Error::InsufficientData(_)
        )
    }
}

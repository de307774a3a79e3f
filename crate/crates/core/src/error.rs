use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Matrix shapes, agent indices or profile lengths do not line up.
    #[error("structural error: {0}")]
    Shape(String),

    /// Input outside the domain of an operation (boundary point for the
    /// entropy inverse map, non-pure point for a stationarity check, ...).
    #[error("domain error: {0}")]
    Domain(String),

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error(
        "not a Nash equilibrium: max violation {violation:e} (agent {agent}, strategy {strategy})"
    )]
    NotNash {
        violation: f64,
        agent: usize,
        strategy: usize,
    },

    #[error("game is not zero-sum: max deviation {0:e}")]
    NotZeroSum(f64),

    #[error("size limit exceeded: {0}")]
    SizeLimit(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("no equilibrium found")]
    NoEquilibrium,

    #[error("configuration error: {0}")]
    Config(String),

    #[error("invalid input data: {0}")]
    Data(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

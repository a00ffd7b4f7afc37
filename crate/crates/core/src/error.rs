use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("span elements live over different bases")]
    BasisMismatch,

    #[error("enclosure refinement exhausted after {steps} steps without deciding the sign")]
    RefinementExhausted { steps: usize },

    #[error("floor could not be decided within the refinement budget")]
    FloorUndecidable,

    #[error("invalid basis: {0}")]
    InvalidBasis(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("intersection matrix is not negative definite")]
    NotNegativeDefinite,

    #[error("matrix is not symmetric")]
    NotSymmetric,

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("model is not lc")]
    NotLc,

    #[error("hypotheses unmet: {0}")]
    HypothesesUnmet(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("element is not contained in the span of the generating set")]
    NotInSpan,

    #[error("{path}: {message}")]
    Parse { path: String, message: String },

    #[error("instance {digest}: {source}")]
    Instance {
        digest: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn parse(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            message: message.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

use thiserror::Error;

/// Errors produced by model evaluation, MR algebra and the search.
#[derive(Debug, Error)]
pub enum Error {
    /// An input or argument violates a documented invariant.
    #[error("validation error: {0}")]
    Validation(String),

    /// The Coriolis parameter is zero; velocities would divide by it.
    #[error("singular parameter: {0}")]
    SingularParameter(String),

    /// Two values that must share a shape or layout do not.
    #[error("shape mismatch: expected {expected}, got {got}")]
    ShapeMismatch { expected: String, got: String },

    /// Cost evaluation hit a non-finite intermediate on one sample.
    #[error("non-finite cost at sample {sample_index}: {detail}")]
    NonFiniteCost { sample_index: usize, detail: String },

    /// Every attempted search candidate evaluated to a non-finite cost.
    #[error("search failure: {0}")]
    SearchFailure(String),

    /// Iterative eigenanalysis did not converge within the iteration cap.
    #[error("eigenanalysis did not converge: residual {residual:.3e} after {iterations} iterations")]
    Convergence { residual: f64, iterations: usize },

    /// Dense search refused above the configured dimension cap.
    #[error("flattened dimension {dim} exceeds the dense-search cap {cap}; shrink the grid")]
    DimensionCap { dim: usize, cap: usize },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

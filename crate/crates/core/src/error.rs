use thiserror::Error;

/// Errors produced anywhere in the pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("csv parse error at row {row}, column {col}: {message}")]
    Csv {
        row: usize,
        col: usize,
        message: String,
    },

    #[error("empty dataset")]
    EmptyDataset,

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("feature dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("unknown classifier preset: {0:?}")]
    UnknownPreset(String),

    #[error("fit failed: {0}")]
    Fit(String),

    #[error("SMO did not converge after {passes} passes (kkt violation {violation:.3e}, objective {objective:.6e})")]
    SmoNonConvergence {
        passes: usize,
        violation: f64,
        objective: f64,
    },

    #[error("fold {fold}: {source}")]
    Fold {
        fold: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("alert parse error: {0}")]
    AlertParse(String),
}

use std::path::PathBuf;

/// Errors raised anywhere in the toolkit.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("rank-deficient design: column(s) {columns:?} are collinear with earlier columns")]
    Singular { columns: Vec<usize> },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("column {column} has zero sample variance")]
    ConstantColumn { column: usize },

    #[error("cross-validation fold {fold} has a constant outcome")]
    FoldDegenerate { fold: usize },

    #[error(
        "selected support too large for the final regression: {selected} controls \
         (outcome equation {outcome_eq}, treatment equation {treatment_eq}) with n = {n}"
    )]
    SupportOverflow {
        outcome_eq: usize,
        treatment_eq: usize,
        selected: usize,
        n: usize,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("usage: {0}")]
    Usage(String),

    #[error("schema mismatch: missing {missing:?}, unexpected {unexpected:?}")]
    Schema {
        missing: Vec<String>,
        unexpected: Vec<String>,
    },

    #[error("parse error at row {row}, column `{column}`: `{value}`")]
    Parse {
        row: usize,
        column: String,
        value: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Toml(#[from] toml::de::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

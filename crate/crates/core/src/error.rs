use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("corpus root {0} does not exist")]
    MissingRoot(PathBuf),
    #[error("no class directories under {0}")]
    NoClasses(PathBuf),
    #[error("class {0} has no images")]
    EmptyClass(String),
    #[error("failed to decode image {path}: {reason}")]
    Decode { path: PathBuf, reason: String },
    #[error("image {path} is {width}x{height}; at least 3x3 is required")]
    ImageTooSmall { path: PathBuf, width: usize, height: usize },
    #[error("negative entry {value} at ({row}, {col})")]
    NegativeEntry { row: usize, col: usize, value: f64 },
    #[error("{name} = {value} out of range: {expected}")]
    OutOfRange {
        name: &'static str,
        value: String,
        expected: String,
    },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("linear system (I - alpha S) is singular")]
    Singular,
    #[error("empty training set")]
    EmptyTrainingSet,
    #[error("no fallback vectors for isolated query node {0}")]
    NoFallback(usize),
    #[error("{0}")]
    InvalidInput(String),
    #[error("fold {fold}: {source}")]
    Fold {
        fold: usize,
        #[source]
        source: Box<Error>,
    },
    #[error("{}, line {line}: {reason}", path.display())]
    Parse { path: PathBuf, line: u64, reason: String },
    #[error("unknown config key `{0}`")]
    UnknownKey(String),
    #[error("invalid value for config key `{key}`: {reason}")]
    InvalidConfigValue { key: String, reason: String },
    #[error("n_folds must be ≥ 2")]
    TooFewFolds,
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn out_of_range(name: &'static str, value: impl ToString, expected: impl Into<String>) -> Self {
        Error::OutOfRange {
            name,
            value: value.to_string(),
            expected: expected.into(),
        }
    }

    pub(crate) fn in_fold(self, fold: usize) -> Self {
        Error::Fold {
            fold,
            source: Box::new(self),
        }
    }

    /// Configuration and argument problems are usage errors; everything else
    /// concerns the data.
    pub fn is_usage(&self) -> bool {
        match self {
            Error::UnknownKey(_) | Error::InvalidConfigValue { .. } | Error::TooFewFolds => true,
            Error::OutOfRange { .. } => true,
            Error::Fold { source, .. } => source.is_usage(),
            _ => false,
        }
    }
}

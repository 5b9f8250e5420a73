use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] srirnn_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {reason}")]
    Wav { path: PathBuf, reason: String },
    #[error("{path}: data ends early at byte offset {offset}")]
    TruncatedWav { path: PathBuf, offset: u64 },
    #[error("{path}: no audio samples")]
    EmptyAudio { path: PathBuf },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("{path}: key `{key}`: {reason}")]
    ModelKey {
        path: PathBuf,
        key: String,
        reason: String,
    },
    #[error("{path}: unsupported unit_type `{unit}`")]
    UnsupportedUnit { path: PathBuf, unit: String },
    #[error("signal of {len} samples cannot be resampled by {ratio}: {reason}")]
    ResampleLength {
        len: usize,
        ratio: String,
        reason: &'static str,
    },
    #[error("invalid filter list `{0}`")]
    FilterList(String),
    #[error("no model in {0} could be loaded")]
    NoModels(PathBuf),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("{0}")]
    Usage(String),
}

impl Error {
    /// Short machine-readable tag for diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Core(_) => "computation",
            Error::Io { .. } => "io",
            Error::Wav { .. } | Error::TruncatedWav { .. } | Error::EmptyAudio { .. } => "wav",
            Error::Json { .. } => "json",
            Error::ModelKey { .. } | Error::UnsupportedUnit { .. } => "model",
            Error::ResampleLength { .. } => "resample",
            Error::FilterList(_) | Error::Usage(_) => "usage",
            Error::NoModels(_) => "models",
            Error::Csv(_) => "csv",
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

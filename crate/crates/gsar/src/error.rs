use std::io;
use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("cannot access {}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("PLY line {line}: {message}")]
    Ply { line: usize, message: String },

    #[error("JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error("TOML: {0}")]
    Toml(#[from] toml::de::Error),

    #[error("CSV: {0}")]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Core(#[from] gsar_core::Error),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("unknown figure '{id}', valid ids: {}", valid.join(", "))]
    UnknownFigure {
        id: String,
        valid: Vec<&'static str>,
    },

    #[error("no results to plot")]
    EmptyResults,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn io_err(path: impl Into<PathBuf>) -> impl FnOnce(io::Error) -> Error {
    let path = path.into();
    move |source| Error::Io { path, source }
}

use std::path::PathBuf;

use iis_core::{
    AnalysisError, ErrorName, FlowError, FrameError, IisvError, ManifestError, PpmError,
    SampleError, SuperImageError,
};

use crate::config::ConfigError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Iisv(#[from] IisvError),
    #[error(transparent)]
    Ppm(#[from] PpmError),
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error(transparent)]
    Sample(#[from] SampleError),
    #[error(transparent)]
    Flow(#[from] FlowError),
    #[error(transparent)]
    SuperImage(#[from] SuperImageError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error(transparent)]
    Manifest(#[from] ManifestError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{}: {source}", path.display())]
    InFile { path: PathBuf, source: Box<Error> },
    #[error("{}: no .ppm files found", .0.display())]
    EmptyDirectory(PathBuf),
    #[error("failed to load clip {}: {source}", path.display())]
    LoadFailure { path: PathBuf, source: Box<Error> },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn in_file(path: impl Into<PathBuf>, source: impl Into<Error>) -> Self {
        Error::InFile {
            path: path.into(),
            source: Box::new(source.into()),
        }
    }
}

impl ErrorName for Error {
    fn name(&self) -> &'static str {
        match self {
            Error::Iisv(e) => e.name(),
            Error::Ppm(e) => e.name(),
            Error::Frame(e) => e.name(),
            Error::Sample(e) => e.name(),
            Error::Flow(e) => e.name(),
            Error::SuperImage(e) => e.name(),
            Error::Analysis(e) => e.name(),
            Error::Manifest(e) => e.name(),
            Error::Config(_) => "ConfigError",
            Error::Io { .. } => "IoError",
            Error::InFile { source, .. } => source.name(),
            Error::EmptyDirectory(_) => "EmptyDirectory",
            Error::LoadFailure { .. } => "LoadFailure",
        }
    }
}

use std::path::PathBuf;

use crate::ascii::AsciiError;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{}: {source}", path.display())]
    Parse { path: PathBuf, source: AsciiError },
    #[error("{}: {source}", path.display())]
    Image {
        path: PathBuf,
        source: image::ImageError,
    },
    #[error("{}: {source}", path.display())]
    Csv { path: PathBuf, source: csv::Error },
    #[error("{}: line {line}: {message}", path.display())]
    Manifest {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("cell sizes differ: rugged {rugged} m, flat {flat} m")]
    CellSizeMismatch { rugged: f64, flat: f64 },
    #[error("{0}")]
    Domain(#[from] terrain_cwt_core::Error),
}

impl Error {
    /// 1 for domain errors, 2 for I/O and parse errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_) | Error::CellSizeMismatch { .. } => 1,
            _ => 2,
        }
    }
}

//! Instance files, generated instances, solution records and the benchmark
//! harness.

pub mod bench;
pub mod generate;
pub mod murray;
pub mod native;
pub mod record;

use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::model::{Instance, ModelError};

pub use generate::{generate_instance, GenParams};
pub use native::{parse_native, write_native};
pub use record::{format_solution, solution_record};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {field}: {reason}")]
    Parse {
        line: usize,
        field: String,
        reason: String,
    },
    #[error("invalid instance: {0}")]
    Model(#[from] ModelError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl IoError {
    pub(crate) fn parse(line: usize, field: impl Into<String>, reason: impl Into<String>) -> Self {
        IoError::Parse {
            line,
            field: field.into(),
            reason: reason.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Native,
    Murray,
}

pub(crate) fn read_file(path: &Path) -> Result<String, IoError> {
    std::fs::read_to_string(path).map_err(|source| IoError::File {
        path: path.to_path_buf(),
        source,
    })
}

/// Reads a native file, or a Murray-style instance directory.
pub fn parse_instance(path: &Path, format: Format) -> Result<Instance, IoError> {
    match format {
        Format::Native => parse_native(&read_file(path)?),
        Format::Murray => murray::read_dir(path, &murray::MurrayOptions::default()),
    }
}

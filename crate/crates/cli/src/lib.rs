//! Command-line front end for `statewit`: state generation, the separability
//! pipeline, witness inspection and the PPT-oracle benchmark.
//!
//! Exit codes of `analyze`: 0 separable (certified), 1 entangled
//! (indicated), 2 inconclusive. Errors use the `sysexits` values
//! [`EXIT_USAGE`] (malformed input or arguments), [`EXIT_NOINPUT`],
//! [`EXIT_SOFTWARE`] and [`EXIT_CANTCREATE`].

pub mod bench;
pub mod cli;
pub mod commands;
pub mod report;

use std::path::PathBuf;

pub const EXIT_SEPARABLE: i32 = 0;
pub const EXIT_ENTANGLED: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_NOINPUT: i32 = 66;
pub const EXIT_SOFTWARE: i32 = 70;
pub const EXIT_CANTCREATE: i32 = 73;

/// Environment variable holding the default `--seed`.
pub const SEED_ENV: &str = "STATEWIT_SEED";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: malformed state file: {reason}")]
    Malformed { path: PathBuf, reason: String },

    #[error("{path}: cannot read: {source}")]
    Unreadable { path: PathBuf, source: std::io::Error },

    #[error("{path}: cannot write: {source}")]
    Unwritable { path: PathBuf, source: std::io::Error },

    #[error("invalid arguments: {0}")]
    Usage(String),

    #[error(transparent)]
    Core(#[from] statewit::Error),

    #[error("csv output failed: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Malformed { .. } | Self::Usage(_) => EXIT_USAGE,
            Self::Core(statewit::Error::InvalidParameter(_)) => EXIT_USAGE,
            Self::Unreadable { .. } => EXIT_NOINPUT,
            Self::Unwritable { .. } => EXIT_CANTCREATE,
            Self::Core(_) | Self::Csv(_) => EXIT_SOFTWARE,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

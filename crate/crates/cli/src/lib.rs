//! Library side of the `oodgate` binary, so tests can drive runs in-process.
//!
//! Exit status: 0 on success, 2 for usage errors (bad flags, invalid
//! configuration), 1 for data errors (unreadable or mismatched inputs).

use std::ffi::OsString;
use std::path::Path;
use std::process::ExitCode;

use clap::Parser;

pub mod args;
mod commands;
pub mod grid;
pub mod input;
pub mod manifest;

pub use manifest::RunManifest;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Clap(#[from] clap::Error),

    #[error("{0}")]
    Usage(String),

    #[error("{context}{source}")]
    Data {
        context: String,
        source: oodgate::Error,
    },
}

impl CliError {
    pub(crate) fn usage(e: impl std::fmt::Display) -> Self {
        CliError::Usage(e.to_string())
    }

    pub(crate) fn io(path: &Path, e: std::io::Error) -> Self {
        Self::at(path, oodgate::Error::Io(e))
    }

    pub(crate) fn at(path: &Path, source: oodgate::Error) -> Self {
        CliError::Data {
            context: format!("{}: ", path.display()),
            source,
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Clap(e) => e.exit_code() as u8,
            CliError::Usage(_) => 2,
            CliError::Data { .. } => 1,
        }
    }
}

impl From<oodgate::Error> for CliError {
    fn from(source: oodgate::Error) -> Self {
        CliError::Data {
            context: String::new(),
            source,
        }
    }
}

/// Runs one command. `argv[0]` is the program name. Every successful run
/// except `replay` writes a manifest next to its primary output.
pub fn run<I, T>(argv: I) -> Result<(), CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let argv: Vec<String> = argv
        .into_iter()
        .map(|a| a.into().to_string_lossy().into_owned())
        .collect();
    let cli = args::Cli::try_parse_from(&argv)?;
    let recorded = argv.get(1..).unwrap_or_default().to_vec();
    commands::dispatch(cli.command, recorded)
}

/// Entry point for `main`: runs, reports errors on stderr, maps the exit status.
pub fn main_with<I, T>(argv: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    match run(argv) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Clap(e)) => {
            let _ = e.print();
            ExitCode::from(e.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

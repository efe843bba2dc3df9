//! Command-line front end: argument parsing, configuration files, dispatch
//! to the library, CSV and manifest output.

pub mod args;
pub mod commands;
pub mod config;
pub mod output;

use std::io::Write;
use std::time::Instant;

use clap::Parser;
use thiserror::Error;

pub use args::{Cli, Command};
pub use commands::run;
pub use output::{ResultManifest, RunOutput, Table};

/// The parsed command line doubles as the experiment configuration.
pub type ExperimentConfig = Cli;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_SELFTEST: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] wigner::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("selftest failed: {0}")]
    Selftest(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_numerical() => EXIT_NUMERICAL,
            CliError::Selftest(_) => EXIT_SELFTEST,
            _ => EXIT_VALIDATION,
        }
    }
}

/// Parses `argv` (including the program name), merging any `--config` file.
pub fn parse_args(argv: &[String]) -> Result<Cli, clap::Error> {
    let merged = config::merge_argv(argv).map_err(|e| {
        clap::Error::raw(clap::error::ErrorKind::InvalidValue, format!("{e}\n"))
    })?;
    Cli::try_parse_from(merged)
}

/// Runs the command described by `cli` and writes its outputs. Without
/// `--out` the main table goes to `stdout` and the manifest to `stderr`.
pub fn execute<O: Write, E: Write>(cli: &Cli, stdout: &mut O, stderr: &mut E) -> Result<(), CliError> {
    let start = Instant::now();
    let output = run(cli)?;
    let mut written = Vec::new();
    match &cli.global.out {
        Some(out) => {
            if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            for (t, p) in output.tables.iter().zip(output::table_paths(out, &output.tables)) {
                t.write_csv(std::fs::File::create(&p)?)?;
                written.push(p.display().to_string());
            }
        }
        None => {
            if let Some(t) = output.tables.first() {
                t.write_csv(&mut *stdout)?;
                written.push("-".into());
            }
        }
    }
    let manifest = ResultManifest {
        tool: "wigner",
        version: env!("CARGO_PKG_VERSION"),
        command: cli.command.name(),
        config: cli,
        outputs: written,
        statistics: &output.statistics,
        criteria: &output.criteria,
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    match &cli.global.out {
        Some(out) => std::fs::write(output::manifest_path(out), json + "\n")?,
        None => writeln!(stderr, "{json}")?,
    }
    if let Some(bad) = output.criteria.iter().find(|c| !c.passed) {
        if matches!(cli.command, Command::Selftest) {
            return Err(CliError::Selftest(format!("{}: {}", bad.name, bad.detail)));
        }
    }
    Ok(())
}

/// Entry point shared by the binary and the tests; returns the exit code.
pub fn main_with_args<O: Write, E: Write>(argv: &[String], stdout: &mut O, stderr: &mut E) -> i32 {
    let cli = match parse_args(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_VALIDATION,
            };
            let _ = write!(if code == EXIT_OK { stdout as &mut dyn Write } else { stderr as &mut dyn Write }, "{}", e.render());
            return code;
        }
    };
    match execute(&cli, stdout, stderr) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

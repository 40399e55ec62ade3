//! Library side of the `sigmarev` binary, split out so tests can drive the
//! whole command line in-process with a canned transport.

pub mod args;
mod commands;
pub mod http;
pub mod report;

use std::ffi::OsString;
use std::fmt;
use std::io::Write;

use clap::error::ErrorKind;
use clap::Parser;
use sigmarev_core::Transport;

pub use args::Cli;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;

/// A failure tagged with the core module whose error caused it.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data {
        module: &'static str,
        kind: String,
        message: String,
    },
}

impl CliError {
    pub(crate) fn data<E: fmt::Debug + fmt::Display>(module: &'static str, err: E) -> Self {
        CliError::Data {
            module,
            kind: variant_name(&err),
            message: err.to_string(),
        }
    }

    pub(crate) fn io(context: impl fmt::Display, err: std::io::Error) -> Self {
        CliError::Data {
            module: "io",
            kind: format!("{:?}", err.kind()),
            message: format!("{context}: {err}"),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Data { .. } => EXIT_DATA,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => f.write_str(m),
            CliError::Data {
                module,
                kind,
                message,
            } if kind.is_empty() => write!(f, "{module} error: {message}"),
            CliError::Data {
                module,
                kind,
                message,
            } => write!(f, "{module} error ({kind}): {message}"),
        }
    }
}

fn variant_name(err: &impl fmt::Debug) -> String {
    let dbg = format!("{err:?}");
    dbg.split(|c: char| !(c.is_alphanumeric() || c == '_'))
        .next()
        .unwrap_or_default()
        .to_string()
}

/// Runs one command line. Returns the process exit code; everything the
/// user should see goes to `stdout` or `stderr`.
pub fn run<I, T>(
    args: I,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
    transport: &dyn Transport,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let help = matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            let text = e.render().to_string();
            if help {
                let _ = stdout.write_all(text.as_bytes());
                return EXIT_OK;
            }
            let _ = stderr.write_all(text.as_bytes());
            return EXIT_USAGE;
        }
    };
    match commands::dispatch(cli, stdout, stderr, transport) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

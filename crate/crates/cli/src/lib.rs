//! Command-line front end for `shapesig`: point and annotation parsing,
//! signature and prototype tables, and the `shapesig` subcommands.
//!
//! [`run_command`] is the whole program minus logger setup, so it can be
//! driven from tests with in-memory output streams.

pub mod annotations;
pub mod commands;
pub mod error;
pub mod points;
pub mod tables;

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;

pub use commands::Cli;
pub use error::{exit, CliError};

/// Parses `argv` (program name first), runs the command and returns the exit
/// status. Results go to `out`, diagnostics to `err`.
pub fn run_command<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    exit::OK
                }
                _ => {
                    let _ = write!(err, "{text}");
                    exit::USAGE
                }
            };
        }
    };
    match commands::run(cli, out, err) {
        Ok(()) => exit::OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

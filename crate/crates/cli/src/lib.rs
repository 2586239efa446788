//! Command-line driver: configuration, execution and report output.

pub mod config;
pub mod report;
pub mod run;

use std::process::ExitCode;

use clap::Parser;

use config::{resolve, Cli, UsageError};
use report::write_atomic;

/// Parses `args`, runs the command and writes the report. Returns the exit
/// code: 0 on success, 1 when the computation fails, 2 on bad input.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let cfg = match resolve(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let outcome = match run::execute(&cfg) {
        Ok(o) => o,
        Err(e) => return failure(&e),
    };
    if let Some(path) = &cfg.output {
        if let Err(e) = write_atomic(path, &outcome.report) {
            eprintln!("error: writing {}: {e}", path.display());
            return ExitCode::from(1);
        }
    }
    println!("{}", outcome.summary);
    ExitCode::SUCCESS
}

fn failure(e: &anyhow::Error) -> ExitCode {
    eprintln!("error: {e:#}");
    let usage = e.chain().any(|c| {
        c.downcast_ref::<UsageError>().is_some()
            || matches!(
                c.downcast_ref::<surfband::Error>(),
                Some(
                    surfband::Error::InvalidParameter { .. }
                        | surfband::Error::GridTooSmall(_)
                        | surfband::Error::FieldFile(_)
                        | surfband::Error::ShellCollapse { .. }
                        | surfband::Error::Extrapolation(_)
                        | surfband::Error::MultivaluedGauge(_)
                )
            )
    });
    ExitCode::from(if usage { 2 } else { 1 })
}

use std::process::ExitCode;

fn main() -> ExitCode {
    surfband_cli::main_with_args(std::env::args_os())
}

use std::process::ExitCode;

fn main() -> ExitCode {
    oodgate_cli::main_with(std::env::args_os())
}

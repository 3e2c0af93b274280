use std::process::ExitCode;

fn main() -> ExitCode {
    stochvi::cli::main_with_args(std::env::args_os())
}

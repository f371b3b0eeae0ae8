use std::process::ExitCode;

fn main() -> ExitCode {
    haarcorr::cli::main_with_args(std::env::args_os())
}

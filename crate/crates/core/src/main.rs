use std::process::ExitCode;

fn main() -> ExitCode {
    spectral_delta::cli::run(std::env::args_os())
}

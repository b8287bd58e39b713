use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(chaid::cli::run(std::env::args()) as u8)
}

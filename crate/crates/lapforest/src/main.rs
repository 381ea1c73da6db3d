use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(lapforest::cli::run())
}

use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(ci_seeker::cli::run(std::env::args_os()))
}

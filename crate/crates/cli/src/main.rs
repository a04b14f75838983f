use std::process::ExitCode;

fn main() -> ExitCode {
    bellmzi_cli::run(std::env::args_os())
}

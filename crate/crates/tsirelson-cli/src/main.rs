use std::process::ExitCode;

fn main() -> ExitCode {
    let code = tsirelson_cli::run_cli(std::env::args());
    ExitCode::from(code as u8)
}

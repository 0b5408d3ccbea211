use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(pyrafem_cli::run(std::env::args_os()))
}

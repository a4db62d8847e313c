use std::process::ExitCode;

fn main() -> ExitCode {
    wqed_cli::app::main_with_args(std::env::args_os())
}

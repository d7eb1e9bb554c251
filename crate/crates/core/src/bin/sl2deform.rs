use std::process::ExitCode;

fn main() -> ExitCode {
    sl2deform::cli::main_with_args(std::env::args_os())
}

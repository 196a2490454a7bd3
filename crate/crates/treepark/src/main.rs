use std::process::ExitCode;

fn main() -> ExitCode {
    treepark::cli::run(std::env::args_os())
}

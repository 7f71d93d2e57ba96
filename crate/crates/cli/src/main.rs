use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(umda_workbench::execute(std::env::args_os()))
}

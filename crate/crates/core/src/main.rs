use std::process::ExitCode;

fn main() -> ExitCode {
    let stdout = std::io::stdout();
    let code = narrow_node::cli::main_with_args(std::env::args_os(), &mut stdout.lock());
    ExitCode::from(code)
}

use std::process::ExitCode;

fn main() -> ExitCode {
    connectx_cli::init_logging();
    let code = connectx_cli::run(std::env::args_os(), &mut std::io::stdin().lock(), &mut std::io::stdout());
    ExitCode::from(code)
}

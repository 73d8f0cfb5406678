use std::process::ExitCode;

fn main() -> ExitCode {
    let env = dynframe::cli::Env::default();
    let code = dynframe::cli::run(std::env::args_os(), &env, &mut std::io::stdout().lock(), &mut std::io::stderr().lock());
    ExitCode::from(code)
}

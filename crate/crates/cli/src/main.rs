use std::io;
use std::process::ExitCode;

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let env_scale = std::env::var(graphcalc_cli::SCALE_ENV).ok();
    let code = graphcalc_cli::run(&argv, env_scale.as_deref(), &mut io::stdout().lock(), &mut io::stderr().lock());
    ExitCode::from(code as u8)
}

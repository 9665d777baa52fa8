use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = cl15_cli::Cli::parse();
    match cl15_cli::execute(&cli) {
        Ok(status) => status.into(),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

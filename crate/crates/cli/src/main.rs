use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = mvam_cli::Cli::parse();
    match mvam_cli::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

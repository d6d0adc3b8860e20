use std::process::ExitCode;

use clap::Parser;
use gptk::{emit, run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command, &cli.config).and_then(|o| emit(&o, &cli.config).map(|_| o.pass)) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("gptk: one or more checks failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("gptk: {e:#}");
            ExitCode::from(2)
        }
    }
}

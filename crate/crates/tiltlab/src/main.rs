use std::process::ExitCode;

use clap::Parser;
use tiltlab::args::Cli;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = tiltlab::execute(&cli).and_then(|run| {
        tiltlab::emit(&run)?;
        Ok(run)
    });
    match result {
        Ok(run) => {
            for w in &run.artifact.warnings {
                eprintln!("warning: {w}");
            }
            eprintln!("{}", run.summary());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

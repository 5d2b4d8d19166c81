use std::process::ExitCode;

use clap::Parser;
use mtee_lab::commands::{emit, run, Cli};
use mtee_lab::LabError;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version go to stdout with success; anything else is a
            // usage error (exit 1, keeping 2 for validation discrepancies).
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("mtee-lab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn execute(cli: &Cli) -> Result<(), LabError> {
    let cfg = cli.args.resolve()?;
    let output = run(cli.command, &cfg, cli.args.inject_fault)?;
    emit(&cfg, &output.bytes)?;
    output.status
}

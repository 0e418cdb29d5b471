use std::process::ExitCode;

use clap::Parser;
use fwbq_cli::{run, Args, ExperimentConfig, EXIT_CONFIG};

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_CONFIG as u8) } else { ExitCode::SUCCESS };
        }
    };
    let result = ExperimentConfig::from_args(&args).and_then(|cfg| run(&cfg));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("fwbq: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

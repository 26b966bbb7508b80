use std::io::Write;
use std::process::ExitCode;

use cyclespan::cli::{self, CliError};

fn main() -> ExitCode {
    match cli::run(std::env::args()) {
        Ok(report) => {
            for line in &report.metadata {
                eprintln!("{line}");
            }
            let result = match &report.output {
                Some(path) => std::fs::write(path, &report.payload).map_err(CliError::Io),
                None => std::io::stdout()
                    .write_all(report.payload.as_bytes())
                    .map_err(CliError::Io),
            };
            match result {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::FAILURE
                }
            }
        }
        Err(CliError::Usage(e)) => {
            // clap renders help/version through the same error path.
            let _ = e.print();
            if e.use_stderr() {
                ExitCode::FAILURE
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

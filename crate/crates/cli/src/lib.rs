//! Library surface of the conekit command line: argument types, command
//! execution, run reports, and certificate replay. The binary is a thin
//! wrapper so that integration tests and the acceptance suite can drive
//! commands in-process.

pub mod args;
pub mod exec;
pub mod io;
pub mod report;
pub mod verify;

pub use args::Cli;
pub use exec::{run, RunError};
pub use report::RunReport;
pub use verify::{verify_report, VerifyOutcome};

/// Runs a command line given as tokens (excluding the binary name).
pub fn run_tokens(tokens: &[&str]) -> Result<(RunReport, i32), RunError> {
    use clap::Parser;
    let mut argv = vec!["conekit"];
    argv.extend_from_slice(tokens);
    let cli = Cli::try_parse_from(argv).map_err(|e| RunError {
        message: e.to_string(),
    })?;
    let report = run(&cli)?;
    let code = report.exit_code();
    Ok((report, code))
}

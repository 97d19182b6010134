use clap::Parser;
use conekit_cli::{args::Cli, exec, report::RunReport};
use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    // CONEKIT_THREADS caps internal parallelism (restart batches).
    if let Ok(threads) = std::env::var("CONEKIT_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build_global();
        }
    }
    let cli = Cli::parse();
    let out_path = cli.out.clone();
    match exec::run(&cli) {
        Ok(report) => {
            let code = report.exit_code();
            if let Err(e) = write_report(&report, out_path.as_deref()) {
                eprintln!("conekit: cannot write report: {e}");
                return ExitCode::from(3);
            }
            ExitCode::from(code as u8)
        }
        Err(e) => {
            eprintln!("conekit: {}", e.message);
            ExitCode::from(3)
        }
    }
}

fn write_report(report: &RunReport, out: Option<&std::path::Path>) -> std::io::Result<()> {
    let json = serde_json::to_string_pretty(report).expect("report serialization");
    match out {
        // Written once, atomically: to a sibling temp file, then renamed.
        Some(path) => {
            let tmp = path.with_extension("tmp");
            {
                let mut f = std::fs::File::create(&tmp)?;
                f.write_all(json.as_bytes())?;
                f.write_all(b"\n")?;
                f.sync_all()?;
            }
            std::fs::rename(&tmp, path)
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(json.as_bytes())?;
            stdout.write_all(b"\n")
        }
    }
}

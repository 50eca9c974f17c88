mod args;
mod commands;
mod table;

use std::process::ExitCode;

use clap::Parser;

use args::Cli;

/// Worker threads for parallel coalition enumeration; unset uses every core.
const WORKERS_ENV: &str = "NETCONTRACT_WORKERS";

fn configure_workers() -> Result<(), String> {
    let Ok(raw) = std::env::var(WORKERS_ENV) else {
        return Ok(());
    };
    let workers: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&w| w > 0)
        .ok_or_else(|| format!("{WORKERS_ENV} must be a positive integer, got {raw:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build_global()
        .map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(msg) = configure_workers() {
        eprintln!("error: {msg}");
        return ExitCode::from(2);
    }
    match commands::run(&cli.command) {
        Ok(out) => {
            if cli.pretty {
                print!("{}", out.table);
            } else {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&out.json).expect("report serializes")
                );
            }
            ExitCode::from(out.exit)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

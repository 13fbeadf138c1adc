//! Batch runner: `extremal-rays run <kind> [flags]`.

mod config;
mod plot;
mod run;

use std::process::ExitCode;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand};
use serde_json::json;

use config::Params;
use run::CliError;

#[derive(Parser)]
#[command(
    name = "extremal-rays",
    version,
    about = "Moduli, laminations and Teichmüller ray experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write its artifacts to --out
    Run(Params),
}

fn unix_now() -> f64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0.0, |d| d.as_secs_f64())
}

fn execute(params: Params) -> Result<(), CliError> {
    let p = params.resolve()?;
    let kind = p.kind()?;
    if let Some(n) = p.threads {
        if n == 0 {
            return Err(CliError::Usage(config::UsageError(
                "--threads must be positive".into(),
            )));
        }
        // Fails only if a pool already exists.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    let dir = p.out_dir();
    config::ensure_dir(&dir)?;
    let started = unix_now();
    let clock = Instant::now();
    let outcome = run::run(&p, &dir);
    let meta = json!({
        "kind": kind,
        "version": env!("CARGO_PKG_VERSION"),
        "threads": rayon::current_num_threads(),
        "started_unix": started,
        "finished_unix": unix_now(),
        "elapsed_seconds": clock.elapsed().as_secs_f64(),
        "params": &p,
        "status": match &outcome {
            Ok(_) => "ok".to_string(),
            Err(e) => e.to_string(),
        },
        "files": outcome.as_ref().map(|o| o.files.clone()).unwrap_or_default(),
    });
    std::fs::write(
        dir.join("metadata.json"),
        serde_json::to_string_pretty(&meta).expect("metadata") + "\n",
    )?;
    let outcome = outcome?;
    println!("{}", outcome.summary);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let Command::Run(params) = cli.command;
    match execute(params) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

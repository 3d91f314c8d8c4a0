mod commands;
mod config;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{Report, EXIT_FAILURE};
use config::RawConfig;

/// Extended Fermi charts of Robertson-Walker cosmologies.
#[derive(Debug, Parser)]
#[command(name = "fermi-chart", version)]
struct Cli {
    /// Configuration file (`key = value` with `[section]` headers).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output file; defaults to the config's `output` key, then stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Override a config key, e.g. `--set model.alpha=3`. Repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check regularity and which extension hypotheses hold.
    Validate,
    /// Export metric coefficients on the (tau, rho) grid.
    Chart,
    /// Per-tau table of big-bang quantities.
    Boundary,
    /// Compare quadrature against power-law closed forms.
    Oracle,
    /// Trace a radial geodesic from the observer.
    Geodesic,
}

fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var("FERMI_CHART_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|n| *n >= 1)
        .ok_or_else(|| format!("FERMI_CHART_THREADS must be a positive integer, got '{raw}'"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn run(cli: Cli) -> Result<u8, String> {
    configure_threads()?;
    let mut raw = match &cli.config {
        Some(path) => RawConfig::load(path).map_err(|e| e.to_string())?,
        None => RawConfig::default(),
    };
    for s in &cli.overrides {
        raw.set(s).map_err(|e| e.to_string())?;
    }
    let cfg = raw.resolve().map_err(|e| e.to_string())?;
    let report: Report = match cli.command {
        Command::Validate => commands::validate(&cfg),
        Command::Chart => commands::chart(&cfg),
        Command::Boundary => commands::boundary(&cfg),
        Command::Oracle => commands::oracle(&cfg),
        Command::Geodesic => commands::geodesic(&cfg),
    }
    .map_err(|e| e.to_string())?;

    match cli.out.or(cfg.output) {
        Some(path) => std::fs::write(&path, &report.body)
            .map_err(|e| format!("cannot write {}: {e}", path.display()))?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(report.body.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| e.to_string())?;
        }
    }
    for n in &report.notes {
        eprintln!("{n}");
    }
    Ok(report.exit)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_FAILURE)
        }
    }
}

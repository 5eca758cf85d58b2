use clap::Parser;
use nlwave_cli::{execute, parse_config};
use std::path::PathBuf;

/// Pseudo-spectral laboratory for nonlocal bidirectional wave equations.
#[derive(Parser)]
#[command(name = "nlwave", version, about)]
struct Args {
    /// Path to a `key = value` configuration file.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Command to run (overrides the config file).
    #[arg(long)]
    command: Option<String>,

    /// Output directory (overrides the config file).
    #[arg(long)]
    out: Option<PathBuf>,

    /// Random seed (overrides the config file).
    #[arg(long)]
    seed: Option<u64>,
}

fn main() {
    let args = Args::parse();
    let text = match &args.config {
        Some(path) => match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => {
                eprintln!("error: reading {}: {e}", path.display());
                std::process::exit(1);
            }
        },
        None => String::new(),
    };
    let cfg = match parse_config(
        &text,
        args.command.as_deref(),
        args.out.as_deref().and_then(|p| p.to_str()),
        args.seed,
    ) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("configuration error: {e}");
            std::process::exit(1);
        }
    };
    match execute(&cfg) {
        Ok(()) => {
            println!("{}: artifacts written to {}", cfg.command.name(), cfg.out_dir);
        }
        Err(e) => {
            eprintln!("error: {}", e.message());
            std::process::exit(e.exit_code());
        }
    }
}

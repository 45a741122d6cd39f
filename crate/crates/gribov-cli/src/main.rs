//! Batch CLI over the core library. One config file in, one report file
//! out; the exit code is the CI contract: 0 clean, 1 failed to run, 2 ran
//! but at least one row tripped its self-check (results still written).

mod config;
mod emit;
mod run;

use clap::Parser;
use config::Format;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "gribov",
    about = "Spectral and semigroup reports for a cubic-regularized Reggeon \
             Hamiltonian on a truncated Fock basis",
    version
)]
struct Cli {
    /// JSON run configuration (see README for the schema)
    #[arg(long)]
    config: PathBuf,
    /// Override the config's output_path
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the config's format: csv | json
    #[arg(long)]
    format: Option<String>,
    /// Override the config's seed
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for independent grid points (default 1)
    #[arg(long)]
    threads: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    let mut cfg = match config::load(&cli.config) {
        Ok(c) => c,
        Err(errors) => {
            eprintln!("config rejected ({} problems):", errors.len());
            for e in &errors {
                eprintln!("  {e}");
            }
            return ExitCode::from(1);
        }
    };

    // precedence: flag > environment > config file
    let mut problems = Vec::new();
    apply_env(&mut cfg, &mut problems);
    if let Some(out) = cli.out {
        cfg.output_path = out;
    }
    if let Some(fmt) = cli.format.as_deref() {
        match parse_format(fmt) {
            Some(f) => cfg.format = f,
            None => problems.push(format!("--format: expected csv | json, got {fmt:?}")),
        }
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }

    let threads = match resolve_threads(cli.threads, &mut problems) {
        Some(t) => t,
        None => 1,
    };
    if !problems.is_empty() {
        for p in &problems {
            eprintln!("{p}");
        }
        return ExitCode::from(1);
    }

    let report = match run::run(&cfg, threads) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("run failed: {e}");
            return ExitCode::from(1);
        }
    };

    if let Err(e) = emit::emit(
        &report,
        cfg.format,
        cfg.command.name(),
        cfg.seed,
        &cfg.output_path,
    ) {
        eprintln!("{e}");
        return ExitCode::from(1);
    }

    let flagged = report.flagged();
    eprintln!(
        "wrote {} ({} rows, {} flagged)",
        cfg.output_path.display(),
        report.len(),
        flagged
    );
    if flagged > 0 {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    }
}

fn parse_format(s: &str) -> Option<Format> {
    match s {
        "csv" => Some(Format::Csv),
        "json" => Some(Format::Json),
        _ => None,
    }
}

fn apply_env(cfg: &mut config::RunConfig, problems: &mut Vec<String>) {
    if let Ok(v) = std::env::var("GRIBOV_OUT") {
        if v.is_empty() {
            problems.push("GRIBOV_OUT: must not be empty".into());
        } else {
            cfg.output_path = PathBuf::from(v);
        }
    }
    if let Ok(v) = std::env::var("GRIBOV_FORMAT") {
        match parse_format(&v) {
            Some(f) => cfg.format = f,
            None => problems.push(format!("GRIBOV_FORMAT: expected csv | json, got {v:?}")),
        }
    }
    if let Ok(v) = std::env::var("GRIBOV_SEED") {
        match v.parse::<u64>() {
            Ok(s) => cfg.seed = s,
            Err(_) => problems.push(format!("GRIBOV_SEED: expected an integer, got {v:?}")),
        }
    }
}

fn resolve_threads(flag: Option<usize>, problems: &mut Vec<String>) -> Option<usize> {
    let from_env = match std::env::var("GRIBOV_THREADS") {
        Ok(v) => match v.parse::<usize>() {
            Ok(t) => Some(t),
            Err(_) => {
                problems.push(format!("GRIBOV_THREADS: expected an integer, got {v:?}"));
                None
            }
        },
        Err(_) => None,
    };
    let t = flag.or(from_env).unwrap_or(1);
    if t == 0 || t > 64 {
        problems.push(format!("threads: must be in 1..=64, got {t}"));
        return None;
    }
    Some(t)
}

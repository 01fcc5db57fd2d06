//! `fdo-spectra <command> --config <path> [--output-dir <path>] [--emit-svg]`
//!
//! Exit codes: 0 success, 1 configuration or i/o, 2 resolution,
//! 3 certificate, 4 numerical contract.

mod config;
mod output;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use config::Command;
use run::Failure;

#[derive(Debug, Parser)]
#[command(
    name = "fdo-spectra",
    version,
    about = "Spectral experiments for cosh(D) + |x|^p e^{|x|^β}"
)]
struct Cli {
    /// Overrides `command` in the config.
    #[arg(value_enum)]
    command: Command,
    #[arg(long)]
    config: PathBuf,
    /// Overrides `output_dir` in the config.
    #[arg(long)]
    output_dir: Option<PathBuf>,
    #[arg(long)]
    emit_svg: bool,
}

fn thread_cap() -> Result<Option<usize>, Failure> {
    match std::env::var("FDO_THREADS") {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Failure::Config(format!(
                "FDO_THREADS must be a positive integer, got {v:?}"
            ))),
        },
    }
}

fn main_inner(cli: Cli) -> Result<(), Failure> {
    if let Some(n) = thread_cap()? {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Io(e.into()))?;
    }
    let text = std::fs::read(&cli.config)
        .map_err(|e| Failure::Config(format!("reading {}: {e}", cli.config.display())))?;
    let mut cfg = config::parse_config(&text).map_err(|e| Failure::Config(e.to_string()))?;
    if let Some(dir) = cli.output_dir {
        cfg.output_dir = dir;
    }
    cfg.emit_svg |= cli.emit_svg;
    if let Some(c) = cfg.command {
        if c != cli.command {
            eprintln!(
                "[fdo-spectra] command {} overrides config command {}",
                cli.command.name(),
                c.name()
            );
        }
    }

    let outcome = run::execute(cli.command, &cfg)?;
    for (name, contents) in &outcome.files {
        output::write_atomic(&cfg.output_dir, name, contents).map_err(Failure::Io)?;
    }
    println!(
        "[fdo-spectra] {}: wrote {} file(s) to {}",
        cli.command.name(),
        outcome.files.len(),
        cfg.output_dir.display()
    );
    match outcome.failure {
        Some(f) => Err(f),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match main_inner(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("[fdo-spectra] error: {f}");
            ExitCode::from(f.exit_code() as u8)
        }
    }
}

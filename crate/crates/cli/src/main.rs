use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use pqc_cli::config::{ConfigError, ExperimentConfig};
use pqc_cli::{plot, run, MANIFEST_NAME};

const EXIT_VALIDATION: u8 = 1;
const EXIT_RUNTIME: u8 = 2;

#[derive(Parser)]
#[command(
    name = "pqc",
    version,
    about = "Parametric quantum channel and energy dephasing experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a TOML config.
    Run {
        config: PathBuf,
        /// Output directory; overrides `output.directory`.
        #[arg(short, long)]
        out: Option<PathBuf>,
        /// Full-size run: d = 64 and 500 realizations.
        #[arg(long)]
        paper_scale: bool,
        /// Overrides `master_seed`.
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides `realizations`.
        #[arg(long)]
        realizations: Option<usize>,
    },
    /// Check a config without running it.
    Validate { config: PathBuf },
    /// Print a gnuplot script for an emitted CSV artifact.
    PlotScript {
        csv: PathBuf,
        /// Write the script here instead of stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

fn load(path: &std::path::Path) -> Result<ExperimentConfig, ExitCode> {
    ExperimentConfig::load(path).map_err(|e| {
        eprintln!("error: {e}");
        ExitCode::from(EXIT_VALIDATION)
    })
}

fn check(cfg: &ExperimentConfig) -> Result<(), ExitCode> {
    let errs = cfg.validate();
    if errs.is_empty() {
        return Ok(());
    }
    eprintln!("error: {}", ConfigError::Invalid(errs));
    Err(ExitCode::from(EXIT_VALIDATION))
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(code) => code,
    }
}

fn dispatch(cli: Cli) -> Result<(), ExitCode> {
    match cli.command {
        Command::Run {
            config,
            out,
            paper_scale,
            seed,
            realizations,
        } => {
            let mut cfg = load(&config)?;
            if paper_scale {
                cfg.apply_full_scale();
            }
            if let Some(s) = seed {
                cfg.master_seed = s;
            }
            if let Some(n) = realizations {
                cfg.realizations = n;
            }
            if let Some(dir) = out {
                cfg.output.directory = dir;
            }
            check(&cfg)?;
            let dir = cfg.output.directory.clone();
            eprintln!(
                "[pqc] {} with d = {}, {} realizations, seed {}",
                cfg.mode, cfg.model.d, cfg.realizations, cfg.master_seed
            );
            let manifest = run(&cfg, &dir).map_err(|e| {
                eprintln!("error: {e}");
                ExitCode::from(EXIT_RUNTIME)
            })?;
            for a in &manifest.artifacts {
                println!("{}", dir.join(&a.path).display());
            }
            println!("{}", dir.join(MANIFEST_NAME).display());
            let failed = manifest.failures();
            eprintln!("[pqc] done in {:.1} s", manifest.wall_seconds);
            if failed > 0 {
                for p in manifest.points.iter().filter(|p| p.error.is_some()) {
                    eprintln!(
                        "error: {}: {}",
                        p.label,
                        p.error.as_deref().unwrap_or_default()
                    );
                }
                return Err(ExitCode::from(EXIT_RUNTIME));
            }
            Ok(())
        }
        Command::Validate { config } => {
            let cfg = load(&config)?;
            check(&cfg)?;
            println!("ok: {} ({} grid points)", cfg.mode, grid_points(&cfg));
            Ok(())
        }
        Command::PlotScript { csv, output } => {
            let script = plot::script_for_file(&csv).map_err(|e| {
                eprintln!("error: {e}");
                ExitCode::from(EXIT_RUNTIME)
            })?;
            match output {
                Some(p) => std::fs::write(&p, script).map_err(|e| {
                    eprintln!("error: cannot write {}: {e}", p.display());
                    ExitCode::from(EXIT_RUNTIME)
                }),
                None => {
                    print!("{script}");
                    Ok(())
                }
            }
        }
    }
}

fn grid_points(cfg: &ExperimentConfig) -> usize {
    match cfg.mode {
        pqc_cli::config::Mode::EdSff => cfg.ed.gamma.len(),
        _ => cfg.channel_grid().len(),
    }
}

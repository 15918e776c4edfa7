use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use dilute_cli::error::{CliError, EXIT_CONFIG};
use dilute_cli::{plot, tasks, ExperimentConfig, Result};

#[derive(Parser)]
#[command(name = "dilute", version, about = "Dilute cooling experiments on spin chains")]
struct Cli {
    /// TOML configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override a configuration key, e.g. `--set model.gamma=0.01`.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    overrides: Vec<String>,
    /// Output directory (overrides `output_dir`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Master seed (overrides `seed`).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; all cores by default.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Liouvillian gap and its first-order estimate per chain length.
    Gap,
    /// Quantum-jump trajectory ensemble with a bootstrap gap fit.
    Traject,
    /// Steerability checks: necessary conditions, kernelizer, Lie closure.
    Steer,
    /// Gap scans over chain length or the α × γ grid.
    Scan,
    /// Cooling-time regime of a long chain.
    Regime,
    /// Render SVG plots for the CSV files in the output directory.
    Plot,
}

fn load(cli: &Cli) -> Result<ExperimentConfig> {
    let mut overrides = cli.overrides.clone();
    if let Some(s) = cli.seed {
        overrides.push(format!("seed={s}"));
    }
    let mut cfg = ExperimentConfig::load(cli.config.as_deref(), &overrides)?;
    if let Some(out) = &cli.out {
        cfg.output_dir = out.clone();
    }
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::config(format!("--threads: {e}")))?;
    }
    let cfg = load(cli)?;
    if let Command::Plot = cli.command {
        let dir = &cfg.output_dir;
        let outcome = plot::render_plots(dir).map_err(|e| CliError::io(dir, e))?;
        for w in &outcome.warnings {
            eprintln!("warning: {w}");
        }
        for p in &outcome.written {
            println!("{}", p.display());
        }
        return Ok(());
    }
    let out = tasks::writer_for(&cfg)?;
    let mut files = vec![tasks::write_config(&cfg, &out)?];
    match cli.command {
        Command::Gap => files.extend(tasks::run_gap(&cfg, &out)?),
        Command::Traject => files.extend(tasks::run_traject(&cfg, &out)?),
        Command::Steer => files.extend(tasks::run_steer(&cfg, &out)?),
        Command::Scan => files.extend(tasks::run_scan(&cfg, &out)?),
        Command::Regime => {
            let (est, path) = tasks::run_regime(&cfg, &out)?;
            eprintln!("regime: {:?}", est.regime);
            files.push(path);
        }
        Command::Plot => unreachable!("handled above"),
    }
    for f in files {
        println!("{}", f.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

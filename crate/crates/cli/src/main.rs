use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sgldiff_cli::config::{Experiment, ExperimentConfig, Overrides};
use sgldiff_cli::error::{CliError, CliResult};

#[derive(Parser)]
#[command(name = "sgldiff", version, about = "Simulate the switched Langevin diffusion and check its bounds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Long Langevin run against its stationary density
    Figure1(Common),
    /// Switched-diffusion paths and histograms across step sizes
    Figure2(Common),
    /// Long-time bias against its bound across step sizes
    #[command(name = "sweep_eta", alias = "sweep-eta")]
    SweepEta(Common),
    /// Synchronous-coupling strong error against its bound
    #[command(name = "strong_error", alias = "strong-error")]
    StrongError(Common),
    /// Convergence to the stationary law from a far start
    Ergodicity(Common),
    /// Reflection couplings and the supermartingale check
    Coupling(Common),
    /// Assumption and lemma checker battery (exit 1 if any check fails)
    Verify(Common),
    /// Theorem constants and bound tables
    Constants(Common),
}

#[derive(Args)]
struct Common {
    /// TOML configuration file
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (default results/<experiment>)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads
    #[arg(long, env = "SGLDIFF_THREADS")]
    threads: Option<usize>,
    /// Comma-separated step sizes
    #[arg(long, value_delimiter = ',')]
    eta: Option<Vec<f64>>,
}

fn run(cli: Cli) -> CliResult<()> {
    let (exp, common) = match cli.command {
        Command::Figure1(c) => (Experiment::Figure1, c),
        Command::Figure2(c) => (Experiment::Figure2, c),
        Command::SweepEta(c) => (Experiment::SweepEta, c),
        Command::StrongError(c) => (Experiment::StrongError, c),
        Command::Ergodicity(c) => (Experiment::Ergodicity, c),
        Command::Coupling(c) => (Experiment::Coupling, c),
        Command::Verify(c) => (Experiment::Verify, c),
        Command::Constants(c) => (Experiment::Constants, c),
    };
    let base = match &common.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    let cfg = base.apply(&Overrides {
        seed: common.seed,
        out: common.out,
        threads: common.threads,
        eta: common.eta,
    });
    if let Some(n) = cfg.threads {
        if n == 0 {
            return Err(CliError::Config("threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Runtime(e.to_string()))?;
    }
    let report = sgldiff_cli::run_and_judge(exp, &cfg)?;
    println!("{}", serde_json::to_string_pretty(&report.summary).expect("summary serialises"));
    eprintln!("wrote {} files to {}", report.manifest.files.len() + 1, report.out_dir.display());
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

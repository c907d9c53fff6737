use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use rabi_core::numerics::resolve_workers;
use rabi_experiments::{run, Config, ExperimentKind, ExperimentSpec, Result};
use serde_json::json;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Command {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
    Rabi,
    Fidelity,
    Qfi,
    Cfi,
    Sweep,
}

impl From<Command> for ExperimentKind {
    fn from(c: Command) -> ExperimentKind {
        match c {
            Command::Fig1 => ExperimentKind::Fig1,
            Command::Fig2 => ExperimentKind::Fig2,
            Command::Fig3 => ExperimentKind::Fig3,
            Command::Fig4 => ExperimentKind::Fig4,
            Command::Rabi => ExperimentKind::Rabi,
            Command::Fidelity => ExperimentKind::Fidelity,
            Command::Qfi => ExperimentKind::Qfi,
            Command::Cfi => ExperimentKind::Cfi,
            Command::Sweep => ExperimentKind::Sweep,
        }
    }
}

/// Rabi dynamics and Fisher information of a falling two-level atom.
#[derive(Debug, Parser)]
#[command(name = "rabi", version)]
struct Cli {
    /// Experiment to run.
    #[arg(value_enum)]
    experiment: Command,
    /// TOML configuration file (flat keys or tables of dotted keys).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (default: out/<experiment>).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (default: RABI_WORKERS, else all cores).
    #[arg(long)]
    workers: Option<usize>,
    /// Also write SVG plots.
    #[arg(long)]
    plot: bool,
    /// Override one key, e.g. --set sigma_p=2 or --set axes.n=[0,1,2].
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

fn execute(cli: Cli) -> Result<Vec<PathBuf>> {
    let kind = ExperimentKind::from(cli.experiment);
    let mut config = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::new(),
    };
    for assignment in &cli.overrides {
        config.apply_override(assignment)?;
    }
    let spec = ExperimentSpec {
        kind,
        config,
        out_dir: cli.out.unwrap_or_else(|| PathBuf::from("out").join(kind.name())),
        plot: cli.plot,
        workers: resolve_workers(cli.workers),
    };
    run(&spec)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            let report = json!({ "error": e.kind(), "message": e.to_string() });
            eprintln!("{report}");
            ExitCode::FAILURE
        }
    }
}

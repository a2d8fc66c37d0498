use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use stochlab::{run_experiment, ExperimentConfig, ExperimentKind, LabError};

#[derive(Debug, Parser)]
#[command(name = "stochlab", version, about = "Desk-scale stochasticity experiments")]
struct Cli {
    #[command(subcommand)]
    kind: Kind,

    /// Flat key = value configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Directory for the report and artifacts.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    #[arg(long, global = true)]
    seed: Option<u64>,

    #[arg(long, global = true)]
    stages: Option<u64>,

    #[arg(long = "witness-cap", global = true)]
    witness_cap: Option<usize>,

    #[arg(long, global = true)]
    budget: Option<u64>,

    #[arg(long, global = true)]
    nmin: Option<u64>,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Kind {
    ConstructH,
    NonadaptiveGame,
    AdaptiveGame,
    WeakStochasticTrace,
    CountBig,
    BuildX,
    AlphaShift,
}

impl From<Kind> for ExperimentKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::ConstructH => ExperimentKind::ConstructH,
            Kind::NonadaptiveGame => ExperimentKind::NonadaptiveGame,
            Kind::AdaptiveGame => ExperimentKind::AdaptiveGame,
            Kind::WeakStochasticTrace => ExperimentKind::WeakStochasticTrace,
            Kind::CountBig => ExperimentKind::CountBig,
            Kind::BuildX => ExperimentKind::BuildX,
            Kind::AlphaShift => ExperimentKind::AlphaShift,
        }
    }
}

fn load(cli: &Cli) -> Result<ExperimentConfig, LabError> {
    let mut config = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|source| LabError::Io { path: path.clone(), source })?;
            ExperimentConfig::parse(&text)?
        }
        None => ExperimentConfig::default(),
    };
    let kind = ExperimentKind::from(cli.kind);
    if let Some(other) = config.kind.filter(|k| *k != kind) {
        return Err(LabError::Invalid(format!("config is for {other}, command is {kind}")));
    }
    config.kind = Some(kind);
    config.seed = cli.seed.or(config.seed);
    config.stages = cli.stages.unwrap_or(config.stages);
    config.witness_cap = cli.witness_cap.unwrap_or(config.witness_cap);
    config.budget = cli.budget.unwrap_or(config.budget);
    config.n_min = cli.nmin.unwrap_or(config.n_min);
    Ok(config)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = load(&cli).and_then(|config| run_experiment(&config, &cli.out));
    match outcome {
        Ok(report) => {
            print!("{report}");
            if report.all_passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("stochlab: {e}");
            ExitCode::from(2)
        }
    }
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qca_dsr_cli::{run, CliResult, Experiment, ExperimentConfig};

/// Dirac quantum cellular automaton: deformed boosts, packets and relative locality.
#[derive(Parser, Debug)]
#[command(name = "qca-dsr", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Dispersion relation and group velocity over the Brillouin zone.
    Dispersion,
    /// Deformed boost of on-shell points over a k-grid.
    BoostPoint,
    /// Boost of the positive-energy part of a single-cell state.
    BoostLocalized,
    /// Boost of narrow-band Gaussian packets.
    BoostPacket,
    /// Two couples of packets crossing at one event, seen from a boosted frame.
    RelativeLocality,
    /// Free evolution of packets or localized states.
    Evolve,
    /// Randomized invariant sweeps with a pass/fail table.
    Verify,
}

impl Command {
    fn experiment(self) -> Experiment {
        match self {
            Command::Dispersion => Experiment::Dispersion,
            Command::BoostPoint => Experiment::BoostPoint,
            Command::BoostLocalized => Experiment::BoostLocalized,
            Command::BoostPacket => Experiment::BoostPacket,
            Command::RelativeLocality => Experiment::RelativeLocality,
            Command::Evolve => Experiment::Evolve,
            Command::Verify => Experiment::Verify,
        }
    }
}

#[derive(Args, Debug)]
struct Overrides {
    /// Configuration file of `key = value` lines.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed of the random sweeps.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Mass parameter(s), comma-separated.
    #[arg(long, global = true, allow_hyphen_values = true)]
    mass: Option<String>,
    /// Boost velocity(ies), comma-separated.
    #[arg(long, global = true, allow_hyphen_values = true)]
    beta: Option<String>,
    /// Lattice size N.
    #[arg(long, global = true)]
    cells: Option<String>,
    /// Number of evolution steps.
    #[arg(long, global = true)]
    steps: Option<String>,
    /// Central wave-vector(s), comma-separated; `pi/5` style values accepted.
    #[arg(long, global = true, allow_hyphen_values = true)]
    k0: Option<String>,
    /// Spectral width of the packets.
    #[arg(long = "sigma-k", global = true)]
    sigma_k: Option<String>,
}

fn build_config(cli: &Cli) -> CliResult<ExperimentConfig> {
    let experiment = cli.command.experiment();
    let o = &cli.overrides;
    let mut cfg = match &o.config {
        Some(path) => ExperimentConfig::from_file(experiment, path)?,
        None => ExperimentConfig::defaults(experiment),
    };
    let fields = [
        ("mass", &o.mass),
        ("beta", &o.beta),
        ("cells", &o.cells),
        ("steps", &o.steps),
        ("k0", &o.k0),
        ("sigma_k", &o.sigma_k),
    ];
    for (key, value) in fields {
        if let Some(v) = value {
            cfg.set(key, v)?;
        }
    }
    if let Some(out) = &o.out {
        cfg.out = out.clone();
    }
    if let Some(seed) = o.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            // Printing help or a usage error to the terminal cannot be recovered from.
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = build_config(&cli).and_then(|cfg| run(&cfg));
    match result {
        Ok(outcome) => {
            for line in &outcome.summary {
                println!("{line}");
            }
            for file in &outcome.files {
                println!("wrote {}", file.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

//! Command-line front end: scenario generation, single runs, sweeps, and
//! Monte Carlo validation. Exit codes encode the error category: 2 config,
//! 3 infeasible, 4 numeric, 1 anything else.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use irsnoma::experiments::{
    db, sweep_irs_elements, sweep_rank, sweep_total_snr, validate_approximation, FixedPowerMode,
};
use irsnoma::report;
use irsnoma::scenario::{load_config, ScenarioFile};
use irsnoma_core::joint::{joint_optimize, SolverConfig};

#[derive(Parser)]
#[command(name = "irsnoma", about = "IRS-assisted MIMO-NOMA downlink simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Print progress details.
    #[arg(short, long, global = true)]
    verbose: bool,
}

#[derive(Args)]
struct CommonIo {
    /// Scenario config JSON.
    #[arg(long)]
    config: PathBuf,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
    /// Override the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Monte Carlo trials per sweep point.
    #[arg(long, default_value_t = 20)]
    trials: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Generate channel matrices for a config and write a scenario file.
    Generate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run the joint optimizer on one scenario (file or config).
    Run {
        /// Scenario file produced by `generate`; mutually exclusive with --config.
        #[arg(long, conflicts_with = "config")]
        scenario: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Sweep the IRS element count at fixed per-beam power.
    SweepN {
        #[command(flatten)]
        io: CommonIo,
        /// Element counts, comma separated.
        #[arg(long, value_delimiter = ',', default_values_t = vec![16, 32, 64, 128])]
        values: Vec<usize>,
    },
    /// Sweep the BS-IRS channel rank at fixed per-beam power.
    SweepRank {
        #[command(flatten)]
        io: CommonIo,
        #[arg(long, value_delimiter = ',', default_values_t = vec![1, 5, 10, 20, 40, 64])]
        values: Vec<usize>,
    },
    /// Sweep the SINR threshold and report the required total SNR.
    SweepSnr {
        #[command(flatten)]
        io: CommonIo,
        /// SINR thresholds (linear), comma separated.
        #[arg(long, value_delimiter = ',', default_values_t = vec![0.5, 1.0, 2.0])]
        gammas: Vec<f64>,
        /// Also dump the per-trial distribution next to the output.
        #[arg(long)]
        raw: bool,
    },
    /// Monte Carlo validation of the covariance SINR approximations.
    Validate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let category = e
                .downcast_ref::<irsnoma_core::Error>()
                .map(|ce| ce.category())
                .unwrap_or("config");
            eprintln!("error[{category}]: {e}");
            match category {
                "config" => ExitCode::from(2),
                "infeasible" => ExitCode::from(3),
                "numeric" => ExitCode::from(4),
                _ => ExitCode::FAILURE,
            }
        }
    }
}

fn load(config: &PathBuf, seed: Option<u64>) -> anyhow::Result<irsnoma_core::channel::ScenarioConfig> {
    let mut cfg = load_config(config)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let verbose = cli.verbose;
    match cli.command {
        Command::Generate { config, out, seed } => {
            let cfg = load(&config, seed)?;
            let file = ScenarioFile::generate(&cfg)?;
            file.save(&out)?;
            if verbose {
                eprintln!("wrote scenario with {} pairs to {}", file.pairs.len(), out.display());
            }
        }
        Command::Run { scenario, config, out, seed } => {
            let (cfg, pairs) = match (scenario, config) {
                (Some(path), _) => ScenarioFile::load(&path)?.to_core()?,
                (None, Some(path)) => {
                    let cfg = load(&path, seed)?;
                    let pairs = irsnoma_core::channel::build_scenario(&cfg)?;
                    (cfg, pairs)
                }
                (None, None) => anyhow::bail!("run needs --scenario or --config"),
            };
            let sol = joint_optimize(&pairs, &cfg, &SolverConfig::default())?;
            report::write_solution_csv(&out, &sol)?;
            println!(
                "converged in {} outer iterations; total power {:.6e} ({:.2} dB SNR); min weak SINR {:.4}",
                sol.outer_iterations,
                sol.total_power(),
                db(sol.total_power() / cfg.sigma2_n),
                sol.weak_sinrs.iter().cloned().fold(f64::INFINITY, f64::min),
            );
        }
        Command::SweepN { io, values } => {
            let cfg = load(&io.config, io.seed)?;
            let rows = sweep_irs_elements(&cfg, &values, io.trials, &FixedPowerMode::default());
            report::write_fixed_power_csv(&io.out, &rows)?;
            if verbose {
                for r in &rows {
                    eprintln!(
                        "N={}: constrained {:.2} dB, unconstrained {:.2} dB, {} failures",
                        r.sweep,
                        r.constrained_db(),
                        r.unconstrained_db(),
                        r.failures
                    );
                }
            }
        }
        Command::SweepRank { io, values } => {
            let cfg = load(&io.config, io.seed)?;
            let rows = sweep_rank(&cfg, &values, io.trials, &FixedPowerMode::default());
            report::write_fixed_power_csv(&io.out, &rows)?;
        }
        Command::SweepSnr { io, gammas, raw } => {
            let cfg = load(&io.config, io.seed)?;
            let rows = sweep_total_snr(&cfg, &gammas, io.trials, &SolverConfig::default());
            report::write_snr_csv(&io.out, &rows)?;
            if raw {
                let raw_path = io.out.with_extension("raw.csv");
                report::write_snr_raw_csv(&raw_path, &rows)?;
            }
        }
        Command::Validate { config, out, seed, samples } => {
            let cfg = load(&config, seed)?;
            let rows = validate_approximation(&cfg, samples, &FixedPowerMode::default())?;
            report::write_validation_csv(&out, &rows)?;
            if verbose {
                for r in &rows {
                    eprintln!(
                        "pair {}: strong rel err {:.4e}, weak rel gap {:+.4e}",
                        r.pair, r.strong_rel_err, r.weak_rel_gap
                    );
                }
            }
        }
    }
    Ok(())
}

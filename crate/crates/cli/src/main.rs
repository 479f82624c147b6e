use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use elastolab::harness::{ExperimentConfig, Registry, TensorKind};
use elastolab::Error;

/// Finite-difference experiments for inhomogeneous elastic waves.
#[derive(Parser, Debug)]
#[command(name = "elastolab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Default)]
struct Common {
    /// JSON config; defaults are used for anything it omits.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Refinement levels for commutator and convergence studies.
    #[arg(long)]
    levels: Option<usize>,
    /// Artifact directory; defaults to `out/<experiment>`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Energy order.
    #[arg(long, value_parser = clap::value_parser!(u8).range(2..=3))]
    k: Option<u8>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a coefficient tensor and check symmetry, null deficits and contractions.
    CheckTensor {
        #[command(flatten)]
        common: Common,
        /// Project onto the null-form kernel.
        #[arg(long)]
        null: bool,
    },
    /// Refinement study of the commutator and Leibniz identities.
    VerifyCommutators(Common),
    /// Solver verification: manufactured packets, phase speed, energy, sentinel, step limit.
    Convergence(Common),
    /// One run to the horizon with energy reports.
    Simulate(Common),
    /// Growth-exponent proxy.
    Theorem1Proxy(Common),
    /// Null versus generic boundedness proxy.
    Theorem2Proxy(Common),
    /// Any registered experiment, named by `--experiment` or the config `kind`.
    Run {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        experiment: Option<String>,
    },
    /// List registered experiments.
    List,
}

fn config_for(common: &Common) -> Result<ExperimentConfig, Error> {
    let mut cfg = match &common.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(levels) = common.levels {
        cfg.commutators.levels = levels;
        cfg.convergence.levels = levels;
    }
    if let Some(k) = common.k {
        cfg.run.k = k as usize;
    }
    cfg.check()?;
    Ok(cfg)
}

fn execute(name: &str, common: &Common, cfg: ExperimentConfig) -> Result<bool, Error> {
    let registry = Registry::builtin();
    let outcome = registry.run(name, &cfg)?;
    let dir = common.out.clone().unwrap_or_else(|| PathBuf::from("out").join(name));
    outcome.write_artifacts(&dir)?;
    std::fs::write(dir.join("config.json"), cfg.to_json()? + "\n")?;
    for note in &outcome.notes {
        eprintln!("note: {note}");
    }
    for line in outcome.summary_lines() {
        println!("{line}");
    }
    println!(
        "{name}: {} (artifacts in {})",
        if outcome.passed() { "PASS" } else { "FAIL" },
        dir.display()
    );
    Ok(outcome.passed())
}

fn dispatch(cli: Cli) -> Result<bool, Error> {
    let (name, common, cfg) = match cli.command {
        Command::List => {
            let registry = Registry::builtin();
            for name in registry.names() {
                let e = registry.get(name).expect("listed experiments exist");
                println!("{name:<26} {}", e.description());
            }
            return Ok(true);
        }
        Command::CheckTensor { common, null } => {
            let mut cfg = config_for(&common)?;
            if null {
                cfg.tensor.kind = TensorKind::Null;
            }
            ("check-tensor".to_string(), common, cfg)
        }
        Command::VerifyCommutators(c) => ("verify-commutators".to_string(), c.clone(), config_for(&c)?),
        Command::Convergence(c) => ("convergence".to_string(), c.clone(), config_for(&c)?),
        Command::Simulate(c) => ("simulate".to_string(), c.clone(), config_for(&c)?),
        Command::Theorem1Proxy(c) => ("theorem1-proxy".to_string(), c.clone(), config_for(&c)?),
        Command::Theorem2Proxy(c) => ("theorem2-proxy".to_string(), c.clone(), config_for(&c)?),
        Command::Run { common, experiment } => {
            let cfg = config_for(&common)?;
            let name = experiment
                .or_else(|| cfg.kind.clone())
                .ok_or_else(|| Error::Config("name an experiment with --experiment or the config kind".into()))?;
            (name, common, cfg)
        }
    };
    execute(&name, &common, cfg)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e @ (Error::Config(_) | Error::InvalidParams(_) | Error::InvalidGrid(_))) => {
            eprintln!("config error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            log::error!("{e}");
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

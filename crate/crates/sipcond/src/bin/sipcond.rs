//! Command-line front end: parses flags and `key=value` overrides, runs one
//! subcommand and writes its CSV table to `--out` or stdout.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sipcond::harness::commands;
use sipcond::harness::config::ExperimentConfig;
use sipcond::{Error, Result};

#[derive(Parser)]
#[command(name = "sipcond", version, about = "Inclusion process in the condensation regime: simulations and numerical checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Range, weights, χ and irreducibility of a jump kernel
    KernelInfo(Common),
    /// Simulate the particle system on a torus
    SimulateSip(Common),
    /// Transition probabilities of the difference chain by uniformization
    DiffProb(Common),
    /// Monte Carlo paths of the difference chain against uniformization
    DiffSim(Common),
    /// Atom, density and hitting probability of sticky Brownian motion
    StickyKernel(Common),
    /// A sticky Brownian path by time change
    StickyPath(Common),
    /// Finite-N and limiting variance of the fluctuation field
    Variance(Common),
    /// Recovery sequence, form limits and dual forms
    Mosco(Common),
    /// Monte Carlo check of the duality relation
    DualityCheck(Common),
    /// Run the acceptance criteria and write a summary
    Acceptance(Common),
}

#[derive(Args)]
struct Common {
    /// File of `key = value` lines
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output CSV path (stdout when absent)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads
    #[arg(long, env = "SIPCOND_THREADS")]
    threads: Option<usize>,
    #[arg(long)]
    tolerance: Option<f64>,
    /// Parameter overrides, applied after the config file
    #[arg(value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

impl Command {
    fn split(self) -> (&'static str, Common) {
        match self {
            Command::KernelInfo(c) => ("kernel-info", c),
            Command::SimulateSip(c) => ("simulate-sip", c),
            Command::DiffProb(c) => ("diff-prob", c),
            Command::DiffSim(c) => ("diff-sim", c),
            Command::StickyKernel(c) => ("sticky-kernel", c),
            Command::StickyPath(c) => ("sticky-path", c),
            Command::Variance(c) => ("variance", c),
            Command::Mosco(c) => ("mosco", c),
            Command::DualityCheck(c) => ("duality-check", c),
            Command::Acceptance(c) => ("acceptance", c),
        }
    }
}

fn build_config(name: &str, common: &Common) -> Result<ExperimentConfig> {
    let mut cfg = match &common.config {
        Some(path) => ExperimentConfig::from_file(name, path)?,
        None => ExperimentConfig::new(name),
    };
    for kv in &common.overrides {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("expected KEY=VALUE, got `{kv}`")))?;
        cfg.set(k.trim(), v.trim())?;
    }
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &common.out {
        cfg.out = Some(out.clone());
    }
    if let Some(t) = common.threads {
        cfg.set("threads", &t.to_string())?;
    }
    if let Some(t) = common.tolerance {
        cfg.set("tolerance", &t.to_string())?;
    }
    Ok(cfg)
}

fn execute(name: &str, common: &Common) -> Result<()> {
    let cfg = build_config(name, common)?;
    if let Some(n) = cfg.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Config(format!("cannot start {n} threads: {e}")))?;
    }
    let table = commands::run(&cfg)?;
    match &cfg.out {
        Some(path) => table.write_file(path)?,
        None => table.write_to(std::io::stdout().lock())?,
    }
    commands::verdict(&table)
}

fn main() -> ExitCode {
    let (name, common) = Cli::parse().command.split();
    match execute(name, &common) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("sipcond {name}: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

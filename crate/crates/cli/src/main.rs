//! `causalab` — run a configured experiment and write its CSV artifact.
//!
//! Exit codes: `0` success, `1` invariant failure, `2` configuration or
//! domain error, `3` guard violation (a state would leave its grid).

mod config;
mod experiments;
mod report;

use std::ffi::OsString;
use std::path::PathBuf;
use std::process::ExitCode;

use causalab::Error;
use clap::{Args, Parser, Subcommand};

use config::{parse_target, Experiment, ExperimentConfig};

#[derive(Parser)]
#[command(name = "causalab", version, about = "Causal localization experiments for free Dirac and Weyl particles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// TOML configuration; omitted sections take the experiment defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output CSV path (default: standard output).
    #[arg(long)]
    out: Option<PathBuf>,
    /// RNG seed, overriding the configuration.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Causal vs Newton–Wigner evolution of a compact state.
    Evolve(Common),
    /// Support edges over time and their tent fits.
    Frontier(Common),
    /// Boosted late-change states in their contracted carrier.
    Boost(Common),
    /// Lorentz contraction into a fixed strip.
    Contract(Common),
    /// Closed-form radial Weyl diagnostics.
    Radial(Common),
    /// Point-localized sequences or energy growth.
    Pol(Common),
    /// Measurement cascades on random positive-energy states.
    Cascade(Common),
    /// Closed-form influence regions and causal-lattice witnesses.
    Lattice(Common),
    /// Monte Carlo measure of timelike lines through two diamonds.
    Lines {
        #[command(flatten)]
        common: Common,
        /// Target value: `2pi2over9`, `4pi2over45` or a number.
        #[arg(long)]
        target: Option<String>,
        /// Number of sampled lines.
        #[arg(long)]
        samples: Option<u64>,
    },
    /// A quick seeded property battery across all modules.
    Selftest(Common),
}

impl Command {
    fn split(self) -> (Experiment, Common, Option<String>, Option<u64>) {
        use Command::*;
        match self {
            Evolve(c) => (Experiment::Evolve, c, None, None),
            Frontier(c) => (Experiment::Frontier, c, None, None),
            Boost(c) => (Experiment::Boost, c, None, None),
            Contract(c) => (Experiment::Contract, c, None, None),
            Radial(c) => (Experiment::Radial, c, None, None),
            Pol(c) => (Experiment::Pol, c, None, None),
            Cascade(c) => (Experiment::Cascade, c, None, None),
            Lattice(c) => (Experiment::Lattice, c, None, None),
            Lines { common, target, samples } => (Experiment::Lines, common, target, samples),
            Selftest(c) => (Experiment::Selftest, c, None, None),
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::ConfigError(_) | Error::DomainViolation(_) | Error::CaseMismatch(_) => 2,
        Error::GuardViolation(_) | Error::SupportExceedsGuard { .. } | Error::BandExceeded { .. } => 3,
        _ => 1,
    }
}

fn load(exp: Experiment, common: &Common, target: Option<String>, samples: Option<u64>) -> causalab::Result<ExperimentConfig> {
    let mut user = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::ConfigError(format!("cannot read {}: {e}", path.display())))?;
            Some(ExperimentConfig::parse(&text)?)
        }
        None => None,
    };
    if let (Some(u), Some(s)) = (user.as_mut(), common.seed) {
        u.seed = Some(s);
    }
    let mut cfg = ExperimentConfig::resolve(user, exp)?;
    if let Some(s) = common.seed {
        cfg.seed = Some(s);
    }
    if let Some(t) = target {
        parse_target(&t)?;
        cfg.lines.target = Some(t);
    }
    if let Some(n) = samples {
        cfg.lines.samples = Some(n);
    }
    Ok(cfg)
}

fn run(command: Command) -> causalab::Result<bool> {
    let (exp, common, target, samples) = command.split();
    let cfg = load(exp, &common, target, samples)?;
    let report = experiments::run(exp, &cfg)?;
    let csv = report.to_csv(exp.name(), &cfg);
    match &common.out {
        Some(path) => std::fs::write(path, csv)
            .map_err(|e| Error::ConfigError(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{csv}"),
    }
    for c in &report.checks {
        eprintln!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    Ok(report.passed())
}

/// Parse the arguments, run, and return the process exit code.
fn run_args<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code() as u8;
        }
    };
    match run(cli.command) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn main() -> ExitCode {
    ExitCode::from(run_args(std::env::args_os()))
}

//! Experiment runner: reproduce the outage/rate/fairness curves from a
//! scenario file and cross-validate Monte Carlo estimates against the closed
//! forms. Outputs are plot-ready CSVs plus a `report.txt` validation summary;
//! the exit status is zero iff every gated check passed.

mod config;
mod experiments;
mod output;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use config::Settings;
use experiments::{find, registry, RunEnv};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "rsma-sim",
    about = "Uplink rate-splitting multiple access: simulator and closed-form cross-validation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write CSVs plus a validation report.
    Run {
        /// Scenario file (TOML); defaults reproduce the reference setup.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Experiment name; see `list`.
        #[arg(long)]
        experiment: String,
        /// Override the per-point trial count.
        #[arg(long)]
        trials: Option<u64>,
        /// Override the master seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory for CSVs and report.txt.
        #[arg(long, default_value = "results")]
        out: PathBuf,
    },
    /// List the available experiments.
    List,
}

fn main() -> ExitCode {
    match run() {
        Ok(passed) => {
            if passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn run() -> Result<bool> {
    let cli = Cli::parse();
    match cli.command {
        Command::List => {
            for e in registry() {
                println!("{:<8} {}", e.name, e.description);
            }
            Ok(true)
        }
        Command::Run { config, experiment, trials, seed, out } => {
            let mut settings = match config {
                Some(path) => Settings::from_file(&path)?,
                None => Settings::default(),
            };
            if let Some(t) = trials {
                if t == 0 {
                    bail!("--trials must be at least 1");
                }
                settings.trials = t;
            }
            if let Some(s) = seed {
                settings.seed = s;
            }
            let Some(exp) = find(&experiment) else {
                let names: Vec<&str> = registry().iter().map(|e| e.name).collect();
                bail!("unknown experiment '{experiment}'; available: {}", names.join(", "));
            };
            std::fs::create_dir_all(&out)
                .with_context(|| format!("cannot create output dir {}", out.display()))?;
            let env = RunEnv { settings: &settings, out_dir: &out };
            let report = (exp.run)(&env)?;
            output::write_report(&out.join("report.txt"), exp.name, &report)?;
            for check in &report.checks {
                println!(
                    "[{}] {} — {}",
                    if check.passed { "PASS" } else { "FAIL" },
                    check.name,
                    check.detail
                );
            }
            println!(
                "{}: {} ({} files in {})",
                exp.name,
                if report.all_passed() { "PASS" } else { "FAIL" },
                report.files.len(),
                out.display()
            );
            Ok(report.all_passed())
        }
    }
}

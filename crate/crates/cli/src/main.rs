//! `bench`: runs the Monte Carlo beamforming experiments from the shell.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use smjio::harness::{
    emit_plot, parse_config, run_experiment, sweep_bound_config, write_csv, ExperimentConfig,
    ExperimentResult,
};

#[derive(Parser, Debug)]
#[command(
    name = "bench",
    version,
    about = "Set-membership reduced-rank beamforming experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the SINR-versus-snapshots experiment.
    Run(Common),
    /// Compare fixed bounds against the time-varying bound.
    SweepBound {
        /// Comma-separated fixed bounds.
        #[arg(long, value_delimiter = ',', required = true)]
        deltas: Vec<f64>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args, Debug)]
struct Common {
    /// Flat `section.key = value` config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated algorithm list.
    #[arg(long)]
    algo: Option<String>,
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long)]
    snapshots: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    rank: Option<usize>,
    /// Worker threads; defaults to all cores.
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    csv: Option<PathBuf>,
    /// SVG plot of mean SINR per snapshot.
    #[arg(long)]
    plot: Option<PathBuf>,
}

impl Common {
    fn overrides(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        let mut push = |key: &str, value: Option<String>| {
            if let Some(v) = value {
                out.push((key.to_string(), v));
            }
        };
        push("run.algorithms", self.algo.clone());
        push("run.runs", self.runs.map(|v| v.to_string()));
        push("run.snapshots", self.snapshots.map(|v| v.to_string()));
        push("run.seed", self.seed.map(|v| v.to_string()));
        push("jio.rank", self.rank.map(|v| v.to_string()));
        push("run.threads", self.threads.map(|v| v.to_string()));
        push(
            "output.csv",
            self.csv.as_ref().map(|p| p.display().to_string()),
        );
        push(
            "output.plot",
            self.plot.as_ref().map(|p| p.display().to_string()),
        );
        out
    }

    fn load(&self, extra: &[(String, String)]) -> Result<ExperimentConfig> {
        let text = match &self.config {
            Some(path) => std::fs::read_to_string(path)
                .with_context(|| format!("cannot read config file {}", path.display()))?,
            None => String::new(),
        };
        let mut overrides = extra.to_vec();
        overrides.extend(self.overrides());
        Ok(parse_config(&text, &overrides)?)
    }
}

fn report(config: &ExperimentConfig, result: &ExperimentResult) -> Result<()> {
    println!(
        "{} runs x {} snapshots, m = {}, q = {}, rank = {}, seed = {}",
        config.runs,
        config.snapshots,
        config.scenario.m,
        config.scenario.q,
        config.rank,
        config.master_seed
    );
    println!(
        "{:<24} {:>14} {:>14} {:>10}",
        "algorithm", "final SINR dB", "update frac", "updates"
    );
    for s in &result.summary {
        println!(
            "{:<24} {:>14.3} {:>14.4} {:>10.1}",
            s.label, s.final_sinr_db, s.update_fraction, s.mean_updates
        );
    }
    if let Some(path) = &config.csv {
        write_csv(&result.curves, Path::new(path))?;
        println!("wrote {}", path.display());
    }
    if let Some(path) = &config.plot {
        emit_plot(&result.curves, Path::new(path))?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run(common) => {
            let config = common.load(&[])?;
            let result = run_experiment(&config)?;
            report(&config, &result)
        }
        Command::SweepBound { deltas, common } => {
            if deltas.iter().any(|d| !(d.is_finite() && *d >= 0.0)) {
                bail!("--deltas must be finite and non-negative, got {deltas:?}");
            }
            // the sweep studies the full-rank set-membership filter unless told otherwise
            let default_algo = [("run.algorithms".to_string(), "fr-sm-sg".to_string())];
            let base = common.load(&default_algo)?;
            let config = sweep_bound_config(&base, &deltas);
            let result = run_experiment(&config)?;
            report(&config, &result)
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

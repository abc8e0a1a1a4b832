use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use dkhub::config::RunConfig;
use dkhub::{io, pipeline, verify};
use dkhub_core::compile::{full_quench_circuit, resource_report};

#[derive(Parser)]
#[command(name = "dkhub", version, about = "Compile and check Fermi-Hubbard circuits in the Derby-Klassen encoding")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Qubit and entangling-layer counts of the compiled circuits.
    Resources(Common),
    /// Full quench circuit as JSON.
    Compile(Common),
    /// Algebra, vacuum, conservation and oracle checks.
    Verify(Common),
    /// Observable time series.
    Simulate(Common),
}

#[derive(Args)]
struct Common {
    /// RunConfig JSON; the built-in 2×2 instance if omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file; stdout if omitted and the config names none.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    shots: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Simulator qubit cap.
    #[arg(long)]
    cap: Option<usize>,
}

impl Common {
    fn load(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                RunConfig::from_json(&text).with_context(|| format!("in {}", path.display()))?
            }
            None => RunConfig::small(),
        };
        if self.shots.is_some() {
            cfg.shots = self.shots;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if self.cap.is_some() {
            cfg.cap = self.cap;
        }
        Ok(cfg)
    }

    fn emit(&self, configured: Option<&String>, body: &str) -> Result<()> {
        let path = self.out.clone().or_else(|| configured.map(PathBuf::from));
        match path {
            Some(p) => fs::write(&p, format!("{body}\n")).with_context(|| format!("writing {}", p.display())),
            None => {
                println!("{body}");
                Ok(())
            }
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Resources(c) => {
            let cfg = c.load()?;
            let report = resource_report(&cfg.model()?, cfg.scheme(), cfg.device(), &cfg.plan()?)?;
            c.emit(cfg.output.report.as_ref(), &io::report_json(&report))?;
        }
        Command::Compile(c) => {
            let cfg = c.load()?;
            let p = cfg.placement(None)?;
            let circuit = full_quench_circuit(&p, &cfg.pattern()?, &cfg.plan()?)?;
            c.emit(cfg.output.circuit.as_ref(), &io::circuit_json(&circuit))?;
        }
        Command::Verify(c) => {
            let cfg = c.load()?;
            let report = verify::verify(&cfg)?;
            c.emit(cfg.output.results.as_ref(), &serde_json::to_string_pretty(&report)?)?;
            return Ok(report.pass);
        }
        Command::Simulate(c) => {
            let cfg = c.load()?;
            let result = pipeline::simulate(&cfg)?;
            c.emit(cfg.output.results.as_ref(), &serde_json::to_string_pretty(&result)?)?;
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("dkhub: verification failed");
            ExitCode::FAILURE
        }
        Err(e) => {
            eprintln!("dkhub: {e:#}");
            ExitCode::FAILURE
        }
    }
}

//! `hamsim` — scenario runner for local-Hamiltonian simulatability
//! analyses. Scenarios are JSON files dispatched by their `kind` field;
//! outputs are CSV curves and JSON reports plus a manifest, all
//! byte-reproducible for a fixed seed.
//!
//! Exit codes: 0 success, 2 validation failure, 3 solver
//! non-convergence (reports are still written).

mod runners;
mod scenario;

use clap::{Parser, Subcommand};
use runners::{RunContext, RunOutcome};
use scenario::{Scenario, KNOWN_KINDS};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "hamsim", version, about = "Local-Hamiltonian dynamics simulatability toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute a scenario file and write its reports.
    Run {
        scenario: PathBuf,
        /// Output directory (default ./hamsim_out).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the scenario seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads for restart/sweep parallelism; falls back to
        /// the HAMSIM_THREADS environment variable.
        #[arg(long)]
        threads: Option<usize>,
        /// Tolerance profile.
        #[arg(long, default_value = "default", value_parser = ["default", "strict"])]
        tol_profile: String,
    },
    /// Check a scenario file without executing it.
    Validate { scenario: PathBuf },
}

fn load_scenario(path: &PathBuf) -> Result<Scenario, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    Scenario::from_json(&text).map_err(|e| {
        if e.contains("unknown variant") || e.contains("missing field `kind`") {
            format!("unknown or missing scenario kind ({e}); valid kinds: {KNOWN_KINDS}")
        } else {
            e
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Validate { scenario } => {
            let parsed = match load_scenario(&scenario) {
                Ok(s) => s,
                Err(e) => {
                    eprintln!("invalid scenario: {e}");
                    return ExitCode::from(2);
                }
            };
            let diags = parsed.validate();
            if diags.is_empty() {
                println!("ok: {} scenario is valid", parsed.kind_name());
                ExitCode::SUCCESS
            } else {
                for d in &diags {
                    println!("diagnostic: {d}");
                }
                ExitCode::from(2)
            }
        }
        Command::Run {
            scenario,
            out,
            seed,
            threads,
            tol_profile,
        } => {
            let mut parsed = match load_scenario(&scenario) {
                Ok(s) => s,
                Err(e) => {
                    eprintln!("invalid scenario: {e}");
                    return ExitCode::from(2);
                }
            };
            if let Some(s) = seed {
                parsed.set_seed(s);
            }
            let diags = parsed.validate();
            if !diags.is_empty() {
                for d in &diags {
                    eprintln!("validation: {d}");
                }
                return ExitCode::from(2);
            }
            let threads = threads.or_else(|| {
                std::env::var("HAMSIM_THREADS")
                    .ok()
                    .and_then(|v| v.parse().ok())
            });
            if let Some(n) = threads {
                if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                    eprintln!("thread pool: {e}");
                }
            }
            let tolerances = match tol_profile.as_str() {
                "strict" => hamsim_core::Tolerances::STRICT,
                _ => hamsim_core::Tolerances::DEFAULT,
            };
            let ctx = RunContext {
                out_dir: out.unwrap_or_else(|| PathBuf::from("hamsim_out")),
                seed: parsed.seed().expect("validation guarantees a seed"),
                tolerances,
                tol_profile,
            };
            match runners::run(&parsed, &ctx) {
                Ok(RunOutcome::Clean) => ExitCode::SUCCESS,
                Ok(RunOutcome::NonConverged) => {
                    eprintln!("solver did not converge; reports written");
                    ExitCode::from(3)
                }
                Err(e) => {
                    eprintln!("run failed: {e}");
                    ExitCode::from(2)
                }
            }
        }
    }
}

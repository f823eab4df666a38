use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use crd_cli::commands::{cmd_certify, cmd_report, cmd_simulate, cmd_verify, Options};
use crd_cli::CliError;

#[derive(Parser)]
#[command(name = "crd-entropy", version, about = "Reaction-diffusion entropy decay: simulate, certify, verify")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Output directory (default: the scenario's `out_dir`, else out/<name>)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Override the scenario's initial-condition seed
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for the parallel kernels
    #[arg(long, global = true, env = "CRD_ENTROPY_THREADS")]
    threads: Option<usize>,
    /// Treat inconclusive checks as failures
    #[arg(long, global = true)]
    strict: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Integrate a scenario and write snapshot and diagnostics CSVs
    Simulate { config: PathBuf },
    /// Build the convergence-rate certificate for a scenario
    Certify { config: PathBuf },
    /// Simulate, certify and run every check; writes run_report.json
    Verify { config: PathBuf },
    /// Render summary.md from a run directory
    Report { dir: PathBuf },
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("--threads: {e}")))?;
    }
    let opts = Options { out: cli.out, seed: cli.seed, strict: cli.strict };
    match cli.cmd {
        Cmd::Simulate { config } => {
            let o = cmd_simulate(&config, &opts)?;
            println!(
                "simulated to t = {} in {} steps; output in {}",
                o.run.traj.final_state().time,
                o.run.traj.accepted_steps,
                o.dir.display()
            );
        }
        Cmd::Certify { config } => {
            let (dir, cert) = cmd_certify(&config, &opts)?;
            for (name, v) in cert.bundle.labeled() {
                println!("{name:>16} = {v:.6e}");
            }
            println!("certificate written to {}", dir.join("certificate.json").display());
        }
        Cmd::Verify { config } => {
            let (dir, report) = cmd_verify(&config, &opts)?;
            for c in &report.criteria {
                println!("[{:>12}] {:>2} {}: {}", c.verdict.label(), c.id, c.name, c.detail);
            }
            println!("report written to {}", dir.display());
            let failing = report.failing(opts.strict);
            if !failing.is_empty() {
                let names: Vec<String> = failing.iter().map(|c| format!("{} ({})", c.id, c.name)).collect();
                return Err(CliError::Check(names.join(", ")));
            }
        }
        Cmd::Report { dir } => print!("{}", cmd_report(&dir)?),
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

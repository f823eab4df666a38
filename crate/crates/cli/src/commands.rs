use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use crd_core::entropy::write_entropy_csv;
use crd_core::grid::{write_diagnostics_csv, write_snapshots_csv};
use serde::Serialize;

use crate::error::CliError;
use crate::io::{write_atomic, write_json, write_text};
use crate::pipeline::{certify, simulate, Certificate, SimRun};
use crate::render::render_markdown;
use crate::scenario::Scenario;
use crate::verify::{verify, RunMeta, RunReport};

pub const REPORT_FILE: &str = "run_report.json";
pub const META_FILE: &str = "run_meta.json";
pub const CERT_FILE: &str = "certificate.json";
pub const SUMMARY_FILE: &str = "summary.md";

#[derive(Debug, Clone, Default)]
pub struct Options {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub strict: bool,
}

pub fn load_scenario(path: &Path, opts: &Options) -> Result<Scenario, CliError> {
    let mut sc = Scenario::load(path)?;
    if let Some(seed) = opts.seed {
        sc.init.seed = seed;
    }
    Ok(sc)
}

pub fn out_dir(sc: &Scenario, opts: &Options) -> PathBuf {
    opts.out.clone().or_else(|| sc.out_dir.clone()).unwrap_or_else(|| PathBuf::from("out").join(&sc.name))
}

fn write_run_files(dir: &Path, run: &SimRun) -> Result<(), CliError> {
    let species = run.net.species().to_vec();
    write_atomic(&dir.join("snapshots.csv"), |w| write_snapshots_csv(w, &run.traj, &species))?;
    write_atomic(&dir.join("diagnostics.csv"), |w| write_diagnostics_csv(w, &run.traj, &species))?;
    let records: Vec<_> = run.traj.diagnostics.iter().filter_map(|r| r.entropy.as_ref()).collect();
    write_atomic(&dir.join("entropy.csv"), |w| write_entropy_csv(w, records.iter().copied(), &species))?;
    Ok(())
}

#[derive(Debug, Serialize)]
struct FailureRecord<'a> {
    failure: &'a str,
    reached_t: f64,
    accepted_steps: usize,
    rejected_steps: usize,
}

#[derive(Debug, Clone)]
pub struct SimulateOutcome {
    pub dir: PathBuf,
    pub run: SimRun,
}

/// Writes snapshot, diagnostics and entropy CSVs. A solver abort still writes
/// what was computed, plus `failure.json`, and returns the solver error.
pub fn cmd_simulate(path: &Path, opts: &Options) -> Result<SimulateOutcome, CliError> {
    let sc = load_scenario(path, opts)?;
    let dir = out_dir(&sc, opts);
    let run = simulate(&sc)?;
    write_run_files(&dir, &run)?;
    if let Some(f) = &run.traj.failure {
        let rec = FailureRecord {
            failure: f,
            reached_t: run.traj.final_state().time,
            accepted_steps: run.traj.accepted_steps,
            rejected_steps: run.traj.rejected_steps,
        };
        write_json(&dir.join("failure.json"), &rec)?;
        return Err(CliError::Solver(format!("{f}; partial output in {}", dir.display())));
    }
    Ok(SimulateOutcome { dir, run })
}

/// Simulates (the three-species bundle needs `k` and `eps` from a run) and writes the certificate.
pub fn cmd_certify(path: &Path, opts: &Options) -> Result<(PathBuf, Certificate), CliError> {
    let sc = load_scenario(path, opts)?;
    let dir = out_dir(&sc, opts);
    let run = simulate(&sc)?;
    if let Some(f) = &run.traj.failure {
        return Err(CliError::Solver(f.clone()));
    }
    let cert = certify(&sc, &run)?;
    write_json(&dir.join(CERT_FILE), &cert)?;
    Ok((dir, cert))
}

/// Runs every check and writes the deterministic report, the timing metadata and the CSVs.
/// Returns the report whether or not checks failed; see [`RunReport::failing`].
pub fn cmd_verify(path: &Path, opts: &Options) -> Result<(PathBuf, RunReport), CliError> {
    let started = Instant::now();
    let sc = load_scenario(path, opts)?;
    let dir = out_dir(&sc, opts);
    let report = verify(&sc)?;
    write_json(&dir.join(REPORT_FILE), &report)?;
    write_json(&dir.join(CERT_FILE), &report.certificate)?;
    write_text(&dir.join(SUMMARY_FILE), &render_markdown(&report))?;
    let meta = RunMeta {
        started_unix_s: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
        wall_clock_s: started.elapsed().as_secs_f64(),
        threads: rayon::current_num_threads(),
        version: env!("CARGO_PKG_VERSION").into(),
    };
    write_json(&dir.join(META_FILE), &meta)?;
    Ok((dir, report))
}

/// Renders `summary.md` from the report in `dir`.
pub fn cmd_report(dir: &Path) -> Result<String, CliError> {
    let missing: Vec<String> =
        [REPORT_FILE].iter().filter(|f| !dir.join(f).is_file()).map(|f| dir.join(f).display().to_string()).collect();
    if !missing.is_empty() {
        return Err(CliError::Config(format!("missing artifacts: {}", missing.join(", "))));
    }
    let path = dir.join(REPORT_FILE);
    let text =
        std::fs::read_to_string(&path).map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
    let report: RunReport =
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let md = render_markdown(&report);
    write_text(&dir.join(SUMMARY_FILE), &md)?;
    Ok(md)
}

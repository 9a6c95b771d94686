//! Experiment runner for the switched Langevin diffusion: figure
//! reproductions, bound checks and the verifier battery, each writing CSV and
//! JSON files plus a `manifest.json` with their digests.

pub mod config;
pub mod error;
pub mod experiments;
pub mod output;

use std::path::PathBuf;
use std::time::Instant;

use config::{Experiment, ExperimentConfig};
use error::{CliError, CliResult};
use experiments::common::Ctx;
use output::{Outputs, RunManifest, MANIFEST_FILE};

/// Result of one run: where the files went and the experiment's summary.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub out_dir: PathBuf,
    pub manifest: RunManifest,
    pub summary: serde_json::Value,
    pub passed: Option<bool>,
}

/// Runs `exp` with `cfg` and writes its outputs and manifest. Default output
/// directory is `results/<experiment>`.
pub fn run_experiment(exp: Experiment, cfg: &ExperimentConfig) -> CliResult<RunReport> {
    cfg.check_experiment(exp)?;
    let out_dir = cfg
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from("results").join(exp.name()));
    let mut out = Outputs::create(&out_dir)?;
    let mut ctx = Ctx::new(cfg);
    let start = Instant::now();
    let outcome = match exp {
        Experiment::Figure1 => experiments::figure1::run(&mut ctx, &mut out),
        Experiment::Figure2 => experiments::stationary::run_figure2(&mut ctx, &mut out),
        Experiment::SweepEta => experiments::stationary::run_sweep_eta(&mut ctx, &mut out),
        Experiment::StrongError => experiments::strong_error::run(&mut ctx, &mut out),
        Experiment::Ergodicity => experiments::ergodicity::run(&mut ctx, &mut out),
        Experiment::Coupling => experiments::coupling::run(&mut ctx, &mut out),
        Experiment::Verify => experiments::verify::run(&mut ctx, &mut out),
        Experiment::Constants => experiments::constants::run(&mut ctx, &mut out),
    }?;
    let manifest = RunManifest::build(&out, exp.name(), ctx.into_echo(), start.elapsed().as_secs_f64())?;
    let path = out_dir.join(MANIFEST_FILE);
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serialises");
    std::fs::write(&path, text + "\n").map_err(|e| CliError::io(&path, e))?;
    Ok(RunReport {
        out_dir,
        manifest,
        summary: outcome.summary,
        passed: outcome.passed,
    })
}

/// Like [`run_experiment`], but a failed verdict becomes [`CliError::CheckFailed`].
pub fn run_and_judge(exp: Experiment, cfg: &ExperimentConfig) -> CliResult<RunReport> {
    let report = run_experiment(exp, cfg)?;
    if report.passed == Some(false) {
        let failed: Vec<String> = report.summary["checks"]
            .as_array()
            .into_iter()
            .flatten()
            .filter(|c| c["passed"] == false)
            .map(|c| match c["family"].as_str() {
                Some(f) => format!("{} ({f})", c["check"].as_str().unwrap_or("?")),
                None => c["check"].as_str().unwrap_or("?").to_owned(),
            })
            .collect();
        return Err(CliError::CheckFailed(failed.join(", ")));
    }
    Ok(report)
}

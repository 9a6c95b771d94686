//! Strong error `E‖θ_t − ζ_t‖` of the switched diffusion under the synchronous coupling.

use serde::Serialize;
use serde_json::json;
use sgldiff::analysis::{compute_constants, fit_power_law, mean_estimate};
use sgldiff::ensemble::run_replicas_lenient;
use sgldiff::processes::{simulate_synchronous_pair_with, Record, SimOptions};
use sgldiff::{config_digest, Error};

use super::common::*;
use super::Outcome;
use crate::config::FamilySpec;
use crate::error::{CliError, CliResult};
use crate::output::Outputs;

pub const DEFAULT_ETAS: [f64; 4] = [1e-1, 1e-2, 1e-3, 1e-4];
/// Largest tolerated share of diverged replicas per step size.
const MAX_DIVERGENT: f64 = 0.01;

#[derive(Debug, Clone, Serialize)]
pub struct StrongRow {
    pub eta: f64,
    pub estimate: f64,
    pub stderr: f64,
    pub plain_bound: f64,
    pub improved_bound: f64,
    pub n_ok: usize,
    pub n_divergent: usize,
}

pub fn run(ctx: &mut Ctx, out: &mut Outputs) -> CliResult<Outcome> {
    let cfg = ctx.cfg;
    let (_, family) = ctx.family(FamilySpec::figure2().with_r(0.1))?;
    let etas = ctx.etas(&DEFAULT_ETAS)?;
    if etas.len() < 3 {
        return Err(CliError::Config("strong_error needs at least 3 eta values".into()));
    }
    let t = ctx.positive("horizon", cfg.horizon, 0.5)?;
    let dt = ctx.positive("dt", cfg.dt, DEFAULT_DT)?;
    let n = ctx.count("n_replicas", cfg.n_replicas, 2000)?;
    let x0 = ctx.point("x0", &cfg.x0, vec![0.0; family.dim()], family.dim())?;
    let digest = config_digest(&ctx.echo_string());
    let consts = compute_constants(&family, &x0)?;
    let opts = SimOptions::new(t, dt).record(Record::Final).quiet();

    let mut rows = Vec::with_capacity(etas.len());
    for &eta in &etas {
        let seed = derive_seed(ctx.seed, "strong_error", eta);
        let results = run_replicas_lenient(seed, n, |key| {
            let pair = simulate_synchronous_pair_with(&family, eta, &x0, &opts, key)?;
            Ok(*pair.r.last().expect("final state recorded"))
        });
        let mut errs = Vec::with_capacity(n);
        let mut divergent = 0;
        for r in results {
            match r {
                Ok(v) => errs.push(v),
                Err(Error::Divergence { .. }) => divergent += 1,
                Err(e) => return Err(e.into()),
            }
        }
        if divergent > 0 {
            log::warn!("eta = {eta}: {divergent} of {n} replicas diverged and were excluded");
        }
        if divergent as f64 > MAX_DIVERGENT * n as f64 {
            return Err(CliError::Runtime(format!(
                "eta = {eta}: {divergent} of {n} replicas diverged (more than 1%)"
            )));
        }
        let e = mean_estimate(&errs);
        let b = consts.theorem1_bound(eta, t);
        rows.push(StrongRow {
            eta,
            estimate: e.mean,
            stderr: e.stderr,
            plain_bound: b.plain,
            improved_bound: b.improved,
            n_ok: errs.len(),
            n_divergent: divergent,
        });
    }
    out.csv(
        "strong_error.csv",
        &["eta", "estimate", "stderr", "plain_bound", "improved_bound"],
        rows.iter().map(|r| {
            vec![r.eta.into(), r.estimate.into(), r.stderr.into(), r.plain_bound.into(), r.improved_bound.into()]
        }),
    )?;
    let fit = fit_power_law(
        &rows.iter().map(|r| r.eta).collect::<Vec<_>>(),
        &rows.iter().map(|r| r.estimate).collect::<Vec<_>>(),
    )
    .ok();
    let below = rows.iter().all(|r| r.estimate <= r.improved_bound);
    let summary = json!({
        "experiment": "strong_error",
        "t": t,
        "rows": rows,
        "fit": fit,
        "fitted_exponent": fit.as_ref().map(|f| f.exponent),
        "all_below_improved_bound": below,
        "constants": consts,
        "config_digest": digest,
    });
    out.json("strong_error_summary.json", &summary)?;
    Ok(Outcome { summary, passed: None })
}

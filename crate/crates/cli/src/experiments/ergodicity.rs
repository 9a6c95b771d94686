//! Convergence of the switched diffusion's marginal law from a far start
//! towards its own stationary law.

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;
use sgldiff::analysis::{bootstrap_1d, compute_constants, fit_exponential_decay};
use sgldiff::ensemble::run_replicas;
use sgldiff::processes::{simulate_sgldiff_with, Record, SimOptions};
use sgldiff::{config_digest, StreamKey};

use super::common::*;
use super::Outcome;
use crate::config::FamilySpec;
use crate::error::{CliError, CliResult};
use crate::output::Outputs;

pub const DEFAULT_TIMES: [f64; 5] = [0.0, 0.25, 0.5, 1.0, 2.0];
/// Points whose estimate is below this many standard errors are left out of the rate fit.
const FIT_MIN_SE: f64 = 3.0;

#[derive(Debug, Clone, Serialize)]
pub struct ErgodicityRow {
    pub eta: f64,
    pub t: f64,
    pub w1: f64,
    pub stderr: f64,
    pub bound: f64,
    /// Bootstrap bias-corrected `W₁`, the value compared with the bound.
    pub w1_debiased: f64,
}

pub fn run(ctx: &mut Ctx, out: &mut Outputs) -> CliResult<Outcome> {
    let cfg = ctx.cfg;
    let (_, family) = ctx.family(FamilySpec::figure2().with_r(0.1))?;
    if family.dim() != 1 {
        return Err(CliError::Config("ergodicity needs a one-dimensional family".into()));
    }
    let etas = ctx.etas(&[1e-2])?;
    let times = ctx.value("times", &cfg.times, DEFAULT_TIMES.to_vec());
    if times.is_empty() || times[0] < 0.0 || times.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(CliError::Config("times must be nonnegative and strictly increasing".into()));
    }
    let dt = ctx.positive("dt", cfg.dt, DEFAULT_DT)?;
    let n = ctx.count("n_replicas", cfg.n_replicas, 100_000)?;
    let x0 = ctx.point("x0", &cfg.x0, vec![4.0], 1)?;
    let ref_horizon = ctx.positive("reference_horizon", cfg.reference_horizon, 50_000.0)?;
    let ref_points = ctx.count("reference_points", cfg.reference_points, 100_000)?;
    let burn_in = ctx.burn_in(ref_horizon)?;
    let n_boot = ctx.count("n_boot", cfg.n_boot, 200)?;
    let digest = config_digest(&ctx.echo_string());
    let consts = compute_constants(&family, &x0)?;
    let horizon = *times.last().expect("nonempty");

    let mut rows = Vec::new();
    for &eta in &etas {
        let seed = derive_seed(ctx.seed, "ergodicity", eta);
        // Reference sample of the stationary law from one long run.
        let steps = ((ref_horizon - burn_in) / dt).floor().max(1.0) as usize;
        let thin = (steps / ref_points).max(1);
        let (_, reference) = long_run(&family, Some(eta), &[0.0], ref_horizon, dt, burn_in, thin, StreamKey::new(seed, u64::MAX))?;
        let opts = SimOptions::new(horizon, dt).record(Record::Times(times.clone())).quiet();
        let paths = run_replicas(seed, n, |key| {
            let p = simulate_sgldiff_with(&family, eta, &x0, &opts, key)?;
            Ok(p.points)
        })?;
        let per_time: Vec<Vec<f64>> = (0..times.len()).map(|j| paths.iter().map(|p| p[j]).collect()).collect();
        let est = per_time
            .par_iter()
            .enumerate()
            .map(|(j, xs)| Ok(bootstrap_1d(xs, &reference, n_boot, derive_seed(seed, "bootstrap", times[j]))?))
            .collect::<CliResult<Vec<_>>>()?;
        let w0 = est[0].estimate;
        for (&t, b) in times.iter().zip(est) {
            rows.push(ErgodicityRow {
                eta,
                t,
                w1: b.estimate,
                stderr: b.stderr,
                bound: consts.theorem2_bound(t, w0),
                w1_debiased: b.debiased(),
            });
        }
    }
    out.csv(
        "ergodicity.csv",
        &["eta", "t", "w1", "stderr", "bound", "w1_debiased"],
        rows.iter().map(|r| {
            vec![r.eta.into(), r.t.into(), r.w1.into(), r.stderr.into(), r.bound.into(), r.w1_debiased.into()]
        }),
    )?;
    let per_eta: Vec<_> = etas
        .iter()
        .map(|&eta| {
            let rs: Vec<&ErgodicityRow> = rows.iter().filter(|r| r.eta == eta).collect();
            let fit_rows: Vec<&&ErgodicityRow> = rs.iter().filter(|r| r.w1_debiased > FIT_MIN_SE * r.stderr).collect();
            let fit = fit_exponential_decay(
                &fit_rows.iter().map(|r| r.t).collect::<Vec<_>>(),
                &fit_rows.iter().map(|r| r.w1_debiased).collect::<Vec<_>>(),
            )
            .ok();
            json!({
                "eta": eta,
                "w0": rs[0].w1,
                "within_bound": rs.iter().all(|r| r.w1_debiased <= r.bound + 2.0 * r.stderr),
                "raw_within_bound": rs.iter().all(|r| r.w1 <= r.bound + 2.0 * r.stderr),
                "fit_points": fit_rows.len(),
                "fit": fit,
                "fitted_rate": fit.as_ref().map(|f| f.rate),
            })
        })
        .collect();
    let summary = json!({
        "experiment": "ergodicity",
        "c": consts.c,
        "C": consts.big_c,
        "per_eta": per_eta,
        "rows": rows,
        "config_digest": digest,
    });
    out.json("ergodicity_summary.json", &summary)?;
    Ok(Outcome { summary, passed: None })
}

//! Long Langevin run against its stationary density.

use serde_json::json;
use sgldiff::analysis::wasserstein1_vs_gaussian;
use sgldiff::{config_digest, StreamKey};

use super::common::*;
use super::Outcome;
use crate::config::FamilySpec;
use crate::error::{CliError, CliResult};
use crate::output::Outputs;

/// Relaxation times (in units of `1/K`) required before a run counts as mixed.
const MIX_BURN_IN: f64 = 5.0;
const MIX_SPAN: f64 = 100.0;

pub fn run(ctx: &mut Ctx, out: &mut Outputs) -> CliResult<Outcome> {
    let cfg = ctx.cfg;
    let (_, fam) = ctx.family(FamilySpec::ornstein_uhlenbeck())?;
    if fam.dim() != 1 {
        return Err(CliError::Config("figure1 needs a one-dimensional family".into()));
    }
    let horizon = ctx.positive("horizon", cfg.horizon, 1000.0)?;
    let dt = ctx.positive("dt", cfg.dt, DEFAULT_DT)?;
    let burn_in = ctx.burn_in(horizon)?;
    let thin = ctx.count("thin", cfg.thin, 10)?;
    let path_points = ctx.count("path_points", cfg.path_points, 10_000)?;
    let n_bins = ctx.count("n_bins", cfg.n_bins, DEFAULT_N_BINS)?;
    let x0 = ctx.point("x0", &cfg.x0, vec![0.0], 1)?;
    let digest = config_digest(&ctx.echo_string());

    let (mut path, samples) = long_run(&fam, None, &x0, horizon, dt, burn_in, thin, StreamKey::new(ctx.seed, 0))?;
    path.config_digest = digest.clone();
    let target = target_density(&fam)?;
    let s = summarise(&samples, &target)?;
    let w1_gaussian = wasserstein1_vs_gaussian(&samples, target.mean(), target.variance())?.value;
    let k = fam.declared_k();
    let mixed = burn_in * k >= MIX_BURN_IN && (horizon - burn_in) * k >= MIX_SPAN;

    let comments = vec![("experiment".to_owned(), "figure1".to_owned()), ("dt".to_owned(), dt.to_string())];
    out.trajectory("fig1_path.csv", &subsample(&path, path_points), &comments)?;
    let (lo, hi) = min_max(&samples);
    out.csv(
        "fig1_hist.csv",
        &["bin_left", "bin_right", "bin_center", "count", "density"],
        histogram(&samples, lo, hi, n_bins)
            .into_iter()
            .map(|(l, r, c, d)| vec![l.into(), r.into(), (0.5 * (l + r)).into(), c.into(), d.into()]),
    )?;
    let lo = lo.min(target.quantile(1e-6));
    let hi = hi.max(target.quantile(1.0 - 1e-6));
    out.csv(
        "fig1_density.csv",
        &["x", "density"],
        linspace(lo, hi, 1001).into_iter().map(|x| vec![x.into(), target.density(x).into()]),
    )?;
    let summary = json!({
        "experiment": "figure1",
        "n_samples": s.n_samples,
        "mean": s.mean,
        "variance": s.variance,
        "w1_target": s.w1_target,
        "w1_stderr": s.w1_stderr,
        "w1_gaussian_moments": w1_gaussian,
        "target_mean": target.mean(),
        "target_variance": target.variance(),
        "horizon": horizon,
        "burn_in": burn_in,
        "dt": dt,
        "mixed": mixed,
        "config_digest": digest,
    });
    out.json("fig1_summary.json", &summary)?;
    Ok(Outcome { summary, passed: None })
}


//! Stationary laws of the switched diffusion across step sizes: per-step-size
//! paths and histograms, and the long-time bias sweep.

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;
use sgldiff::analysis::{compute_constants, wasserstein1_vs_gaussian};
use sgldiff::{config_digest, Family, Path, StreamKey};

use super::common::*;
use super::Outcome;
use crate::config::FamilySpec;
use crate::error::{CliError, CliResult};
use crate::output::Outputs;

pub const FIGURE2_ETAS: [f64; 5] = [10.0, 1.0, 0.1, 0.01, 0.001];

#[derive(Debug, Clone, Serialize)]
pub struct EtaRow {
    pub eta: f64,
    #[serde(flatten)]
    pub stats: SampleSummary,
    pub w1_gaussian_moments: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MonotoneStep {
    pub from_eta: f64,
    pub to_eta: f64,
    pub drop: f64,
    pub combined_stderr: f64,
    pub separated: bool,
}

/// Checks that `W₁` falls at each step to a smaller `η` by more than two combined standard errors.
pub fn monotone_steps(rows: &[EtaRow]) -> Vec<MonotoneStep> {
    let mut sorted: Vec<&EtaRow> = rows.iter().collect();
    sorted.sort_by(|a, b| b.eta.total_cmp(&a.eta));
    sorted
        .windows(2)
        .map(|w| {
            let drop = w[0].stats.w1_target - w[1].stats.w1_target;
            let se = w[0].stats.w1_stderr.hypot(w[1].stats.w1_stderr);
            MonotoneStep {
                from_eta: w[0].eta,
                to_eta: w[1].eta,
                drop,
                combined_stderr: se,
                separated: drop > 2.0 * se,
            }
        })
        .collect()
}

struct Sweep {
    family: Family,
    spec: FamilySpec,
    etas: Vec<f64>,
    runs: Vec<(Path, Vec<f64>)>,
    rows: Vec<EtaRow>,
    target: sgldiff::Density1D,
    digest: String,
}

fn sweep(ctx: &mut Ctx, tag: &str, default_family: FamilySpec) -> CliResult<Sweep> {
    let cfg = ctx.cfg;
    let (spec, family) = ctx.family(default_family)?;
    if family.dim() != 1 {
        return Err(CliError::Config(format!("{tag} needs a one-dimensional family")));
    }
    let etas = ctx.etas(&FIGURE2_ETAS)?;
    let horizon = ctx.positive("horizon", cfg.horizon, 1000.0)?;
    let dt = ctx.positive("dt", cfg.dt, DEFAULT_DT)?;
    let burn_in = ctx.burn_in(horizon)?;
    let thin = ctx.count("thin", cfg.thin, 10)?;
    let x0 = ctx.point("x0", &cfg.x0, vec![0.0], 1)?;
    let seed = ctx.seed;
    let digest = config_digest(&ctx.echo_string());
    let target = target_density(&family)?;
    let runs = etas
        .par_iter()
        .map(|&eta| {
            let key = StreamKey::new(derive_seed(seed, tag, eta), 0);
            long_run(&family, Some(eta), &x0, horizon, dt, burn_in, thin, key)
        })
        .collect::<CliResult<Vec<_>>>()?;
    let rows = etas
        .iter()
        .zip(&runs)
        .map(|(&eta, (_, samples))| {
            Ok(EtaRow {
                eta,
                stats: summarise(samples, &target)?,
                w1_gaussian_moments: wasserstein1_vs_gaussian(samples, target.mean(), target.variance())?.value,
            })
        })
        .collect::<CliResult<Vec<_>>>()?;
    Ok(Sweep {
        family,
        spec,
        etas,
        runs,
        rows,
        target,
        digest,
    })
}

/// Per-`η` paths with index annotation, histograms, and target and component densities.
pub fn run_figure2(ctx: &mut Ctx, out: &mut Outputs) -> CliResult<Outcome> {
    let path_points = ctx.count("path_points", ctx.cfg.path_points, 10_000)?;
    let n_bins = ctx.count("n_bins", ctx.cfg.n_bins, DEFAULT_N_BINS)?;
    let mut sw = sweep(ctx, "figure2", FamilySpec::figure2())?;
    let n = sw.family.n_components();

    let mut hist_rows = Vec::new();
    let (mut lo, mut hi) = (sw.target.quantile(1e-6), sw.target.quantile(1.0 - 1e-6));
    for (&eta, (path, samples)) in sw.etas.iter().zip(sw.runs.iter_mut()) {
        path.config_digest = sw.digest.clone();
        let comments = vec![
            ("experiment".to_owned(), "figure2".to_owned()),
            ("eta".to_owned(), eta.to_string()),
        ];
        out.trajectory(&format!("fig2_path_eta{}.csv", eta_label(eta)), &subsample(path, path_points), &comments)?;
        let (a, b) = min_max(samples);
        lo = lo.min(a);
        hi = hi.max(b);
        for (l, r, c, d) in histogram(samples, a, b, n_bins) {
            hist_rows.push(vec![eta.into(), l.into(), r.into(), (0.5 * (l + r)).into(), c.into(), d.into()]);
        }
    }
    out.csv("fig2_hist.csv", &["eta", "bin_left", "bin_right", "bin_center", "count", "density"], hist_rows)?;

    // Component stationary laws: exact N(b_i, 1/a_i) for quadratic families, tabulated otherwise.
    let quadratic = sw.spec.kind == "quadratic";
    let components: Vec<sgldiff::Density1D> = if quadratic {
        Vec::new()
    } else {
        (0..n).map(|i| component_density(&sw.family, i)).collect::<CliResult<_>>()?
    };
    let moments: Vec<(f64, f64)> = (0..n)
        .map(|i| match (&sw.spec.a, &sw.spec.b) {
            (Some(a), Some(b)) if quadratic => (b[i], 1.0 / a[i]),
            _ => (components[i].mean(), components[i].variance()),
        })
        .collect();
    for &(m, v) in &moments {
        lo = lo.min(m - 6.0 * v.sqrt());
        hi = hi.max(m + 6.0 * v.sqrt());
    }
    let comp_density = |i: usize, x: f64| {
        if quadratic {
            sgldiff::analysis::gaussian_density(x, moments[i].0, moments[i].1)
        } else {
            components[i].density(x)
        }
    };
    let mut header = vec!["x".to_owned(), "target".to_owned()];
    header.extend((0..n).map(|i| format!("component_{i}")));
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    out.csv(
        "fig2_density.csv",
        &header,
        linspace(lo, hi, 2001).into_iter().map(|x| {
            let mut row = vec![x.into(), sw.target.density(x).into()];
            row.extend((0..n).map(|i| comp_density(i, x).into()));
            row
        }),
    )?;
    out.csv(
        "fig2_components.csv",
        &["component", "mean", "variance"],
        moments.iter().enumerate().map(|(i, &(m, v))| vec![i.into(), m.into(), v.into()]),
    )?;
    let steps = monotone_steps(&sw.rows);
    let summary = json!({
        "experiment": "figure2",
        "rows": sw.rows,
        "target_mean": sw.target.mean(),
        "target_variance": sw.target.variance(),
        "monotone_steps": steps,
        "decreasing_in_eta": steps.iter().all(|s| s.separated),
        "config_digest": sw.digest,
    });
    out.json("fig2_summary.json", &summary)?;
    Ok(Outcome { summary, passed: None })
}

/// `W₁(μ̂^η, μ)` against the long-time bias bound for every swept `η`.
pub fn run_sweep_eta(ctx: &mut Ctx, out: &mut Outputs) -> CliResult<Outcome> {
    let sw = sweep(ctx, "sweep_eta", FamilySpec::figure2().with_r(0.1))?;
    let consts = compute_constants(&sw.family, &[0.0])?;
    let bounds: Vec<f64> = sw.etas.iter().map(|&e| consts.theorem3_bound(e)).collect();
    out.csv(
        "sweep_eta.csv",
        &["eta", "w1", "stderr", "theorem3_bound", "mean", "variance"],
        sw.rows.iter().zip(&bounds).map(|(r, &b)| {
            vec![r.eta.into(), r.stats.w1_target.into(), r.stats.w1_stderr.into(), b.into(), r.stats.mean.into(), r.stats.variance.into()]
        }),
    )?;
    let steps = monotone_steps(&sw.rows);
    let below = sw.rows.iter().zip(&bounds).all(|(r, &b)| r.stats.w1_target <= b);
    let summary = json!({
        "experiment": "sweep_eta",
        "rows": sw.rows,
        "theorem3_bound": bounds,
        "all_below_bound": below,
        "monotone_steps": steps,
        "decreasing_in_eta": steps.iter().all(|s| s.separated),
        "constants": consts,
        "config_digest": sw.digest,
    });
    out.json("sweep_eta_summary.json", &summary)?;
    Ok(Outcome { summary, passed: None })
}

//! Reflection couplings of two switched diffusions sharing one index process.

use serde_json::json;
use sgldiff::analysis::{compute_constants, mean_estimate, supermartingale_check};
use sgldiff::ensemble::run_replicas;
use sgldiff::processes::{simulate_reflection_coupling_with, Record, SimOptions, DEFAULT_EPS_MEET};
use sgldiff::config_digest;

use super::common::*;
use super::ergodicity::DEFAULT_TIMES;
use super::Outcome;
use crate::config::FamilySpec;
use crate::error::{CliError, CliResult};
use crate::output::{Cell, Outputs};

pub fn run(ctx: &mut Ctx, out: &mut Outputs) -> CliResult<Outcome> {
    let cfg = ctx.cfg;
    let (_, family) = ctx.family(FamilySpec::trig(&[-1.0, 1.0]))?;
    let d = family.dim();
    let eta = match ctx.etas(&[0.1])?.as_slice() {
        [e] => *e,
        _ => return Err(CliError::Config("coupling takes a single eta".into())),
    };
    let times = ctx.value("times", &cfg.times, DEFAULT_TIMES.to_vec());
    if times.is_empty() || times[0] < 0.0 || times.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(CliError::Config("times must be nonnegative and strictly increasing".into()));
    }
    let dt = ctx.positive("dt", cfg.dt, DEFAULT_DT)?;
    let n = ctx.count("n_replicas", cfg.n_replicas, 1000)?;
    let eps = ctx.positive("eps_meet", cfg.eps_meet, DEFAULT_EPS_MEET)?;
    let x0 = ctx.point("x0", &cfg.x0, vec![3.0; d], d)?;
    let y0 = ctx.point("y0", &cfg.y0, vec![-3.0; d], d)?;
    let digest = config_digest(&ctx.echo_string());
    let consts = compute_constants(&family, &x0)?;
    let horizon = *times.last().expect("nonempty");
    let opts = SimOptions::new(horizon, dt).record(Record::Times(times.clone())).quiet();
    let seed = derive_seed(ctx.seed, "coupling", eta);

    let runs = run_replicas(seed, n, |key| simulate_reflection_coupling_with(&family, eta, &x0, &y0, eps, &opts, key))?;
    let report = supermartingale_check(&runs, consts.c, &times, seed)?;

    let mut rows = Vec::with_capacity(times.len());
    for (k, &t) in times.iter().enumerate() {
        let r: Vec<f64> = runs.iter().map(|c| c.r[k]).collect();
        let f: Vec<f64> = runs.iter().map(|c| c.f_of_r[k]).collect();
        let ecf: Vec<f64> = f.iter().map(|v| (consts.c * t).exp() * v).collect();
        let met = runs.iter().filter(|c| c.met_by(t)).count() as f64 / n as f64;
        let e = mean_estimate(&ecf);
        rows.push(vec![
            t.into(),
            mean_estimate(&r).mean.into(),
            mean_estimate(&f).mean.into(),
            e.mean.into(),
            e.stderr.into(),
            met.into(),
        ]);
    }
    out.csv(
        "coupling.csv",
        &["t", "mean_r", "mean_f", "mean_ecf", "stderr", "fraction_met"],
        rows,
    )?;
    out.csv(
        "coupling_meeting_times.csv",
        &["replica", "met", "meeting_time"],
        runs.iter().enumerate().map(|(i, c)| {
            vec![
                i.into(),
                Cell::Int(c.meeting_time.is_some() as i64),
                c.meeting_time.map_or(Cell::Text(String::new()), Cell::from),
            ]
        }),
    )?;
    let met_by_horizon = runs.iter().filter(|c| c.met_by(horizon)).count() as f64 / n as f64;
    let summary = json!({
        "experiment": "coupling",
        "eta": eta,
        "c": consts.c,
        "horizon": horizon,
        "fraction_met_by_horizon": met_by_horizon,
        "supermartingale": report,
        "config_digest": digest,
    });
    out.json("coupling_summary.json", &summary)?;
    Ok(Outcome { summary, passed: None })
}

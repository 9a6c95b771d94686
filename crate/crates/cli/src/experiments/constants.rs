//! Theorem constants of one family and a table of the bounds they imply.

use serde_json::json;
use sgldiff::analysis::compute_constants;
use sgldiff::config_digest;

use super::common::*;
use super::Outcome;
use crate::config::FamilySpec;
use crate::error::{CliError, CliResult};
use crate::output::Outputs;

pub fn run(ctx: &mut Ctx, out: &mut Outputs) -> CliResult<Outcome> {
    let cfg = ctx.cfg;
    let (_, family) = ctx.family(FamilySpec::figure2().with_r(0.1))?;
    let etas = ctx.etas(&[1.0, 1e-1, 1e-2, 1e-3, 1e-4])?;
    let times = ctx.value("times", &cfg.times, vec![0.5, 1.0, 2.0, 5.0]);
    if times.iter().any(|&t| !(t >= 0.0 && t.is_finite())) {
        return Err(CliError::Config("times must be finite and nonnegative".into()));
    }
    let x0 = ctx.point("x0", &cfg.x0, vec![0.0; family.dim()], family.dim())?;
    let w0 = ctx.value("w0", &cfg.w0, 1.0);
    let digest = config_digest(&ctx.echo_string());
    let consts = compute_constants(&family, &x0)?;
    out.json("constants.json", &consts)?;
    let mut rows = Vec::new();
    for &eta in &etas {
        for &t in &times {
            let b = consts.theorem1_bound(eta, t);
            rows.push(vec![
                eta.into(),
                t.into(),
                b.plain.into(),
                b.improved.into(),
                consts.theorem2_bound(t, w0).into(),
                consts.theorem3_bound(eta).into(),
                consts.combined_bound(eta, t, w0).into(),
            ]);
        }
    }
    out.csv(
        "bounds.csv",
        &["eta", "t", "theorem1_plain", "theorem1_improved", "theorem2", "theorem3", "combined"],
        rows,
    )?;
    let summary = json!({
        "experiment": "constants",
        "constants": consts,
        "w0": w0,
        "config_digest": digest,
    });
    Ok(Outcome { summary, passed: None })
}

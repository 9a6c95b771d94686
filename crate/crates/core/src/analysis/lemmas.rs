//! Monte Carlo verifiers for the moment, continuity and averaging lemmas and
//! for the supermartingale property behind the contraction argument.
//!
//! Every verifier compares a replica mean with a closed-form bound and passes
//! when `estimate ≤ bound + 2·stderr`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::ensemble::run_replicas;
use crate::error::{invalid, Result};
use crate::potentials::PotentialFamily;
use crate::processes::{simulate_langevin_with, CoupledTrajectory, IndexProcess, Record, SimOptions};
use crate::rng::{config_digest, StreamKey};
use crate::scalar::{norm_sq, Real};

use super::constants::compute_constants;
use super::stats::mean_estimate;

/// Number of standard errors allowed by every Monte Carlo comparison.
pub const TOLERANCE_SE: f64 = 2.0;

/// Outcome of one verifier, serialised as one JSON object.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifierReport {
    pub check: String,
    pub passed: bool,
    pub estimate: f64,
    pub bound: f64,
    pub stderr: f64,
    pub n: usize,
    pub seed: u64,
    pub config_digest: String,
    /// Auxiliary series (per-time means, per-state estimates, ...).
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub detail: BTreeMap<String, Vec<f64>>,
}

impl VerifierReport {
    fn new(check: &str, estimate: f64, bound: f64, stderr: f64, n: usize, seed: u64, canonical: &str) -> Self {
        Self {
            check: check.to_owned(),
            passed: estimate <= bound + TOLERANCE_SE * stderr,
            estimate,
            bound,
            stderr,
            n,
            seed,
            config_digest: config_digest(canonical),
            detail: BTreeMap::new(),
        }
    }
}

fn langevin_opts<S: Real>(horizon: S, dt: S, record: Record<S>) -> SimOptions<S> {
    SimOptions::new(horizon, dt).record(record).quiet()
}

/// Second-moment bound for the Langevin diffusion: `E‖ζ_t‖² ≤ tilde_c(t)`.
pub fn lemma1_check<S: Real>(
    family: &PotentialFamily<S>,
    theta0: &[S],
    t: S,
    dt: S,
    n_replicas: usize,
    seed: u64,
) -> Result<VerifierReport> {
    if n_replicas == 0 {
        return invalid("n_replicas must be positive");
    }
    let consts = compute_constants(family, theta0)?;
    let opts = langevin_opts(t, dt, Record::Final);
    let sq = run_replicas(seed, n_replicas, |key| {
        let p = simulate_langevin_with(family, theta0, &opts, key)?;
        Ok(norm_sq(p.last_point()).as_f64())
    })?;
    let e = mean_estimate(&sq);
    let canonical = format!("lemma1;family={};theta0={:?};t={};dt={};n={}", family.name(), theta0, t, dt, n_replicas);
    Ok(VerifierReport::new("lemma1", e.mean, consts.tilde_c(t).as_f64(), e.stderr, n_replicas, seed, &canonical))
}

/// Time continuity: `E‖ζ_t − ζ_s‖² ≤ c_lemma2(t)·|t − s|`.
#[allow(clippy::too_many_arguments)]
pub fn lemma2_check<S: Real>(
    family: &PotentialFamily<S>,
    theta0: &[S],
    t: S,
    s: S,
    dt: S,
    n_replicas: usize,
    seed: u64,
) -> Result<VerifierReport> {
    if !(s >= S::zero() && t >= s) {
        return invalid(format!("need t ≥ s ≥ 0, got t = {t}, s = {s}"));
    }
    if n_replicas == 0 {
        return invalid("n_replicas must be positive");
    }
    let consts = compute_constants(family, theta0)?;
    let canonical = format!("lemma2;family={};theta0={:?};t={};s={};dt={};n={}", family.name(), theta0, t, s, dt, n_replicas);
    let bound = (consts.c_lemma2(t) * (t - s)).as_f64();
    if t == s {
        return Ok(VerifierReport::new("lemma2", 0.0, bound, 0.0, n_replicas, seed, &canonical));
    }
    let opts = langevin_opts(t, dt, Record::Times(vec![s, t]));
    let sq = run_replicas(seed, n_replicas, |key| {
        let p = simulate_langevin_with(family, theta0, &opts, key)?;
        let d: S = p.point(0).iter().zip(p.point(1)).map(|(&a, &b)| (b - a) * (b - a)).sum();
        Ok(d.as_f64())
    })?;
    let e = mean_estimate(&sq);
    Ok(VerifierReport::new("lemma2", e.mean, bound, e.stderr, n_replicas, seed, &canonical))
}

/// Averaging of a centred vector field along the index process:
/// `sup_j E_j‖∫₀^{t/η} g_{𝒊(s)} ds‖² ≤ (2 max‖g_i‖²/N)·(t/η)`, the index
/// running on its natural time scale (unit rate to each other state).
pub fn lemma3_check<S: Real>(g: &[Vec<S>], eta: S, t: S, n_replicas: usize, seed: u64) -> Result<VerifierReport> {
    let n = g.len();
    if n == 0 {
        return invalid("g must have at least one component");
    }
    let dim = g[0].len();
    if dim == 0 || g.iter().any(|v| v.len() != dim) {
        return invalid("all g_i must share a positive dimension");
    }
    if !(eta > S::zero() && t >= S::zero()) {
        return invalid(format!("need eta > 0 and t ≥ 0, got eta = {eta}, t = {t}"));
    }
    if n_replicas == 0 {
        return invalid("n_replicas must be positive");
    }
    let max_sq = g.iter().map(|v| norm_sq(v)).fold(S::zero(), S::max);
    let scale = max_sq.sqrt().max(S::one());
    for j in 0..dim {
        let s: S = g.iter().map(|v| v[j]).sum();
        if s.abs() > S::lit(1e-12) * scale {
            return invalid(format!("g is not centred: coordinate {j} sums to {s}"));
        }
    }
    let horizon = t / eta;
    let bound = (S::lit(2.0) * max_sq / S::from_usize_lossy(n) * horizon).as_f64();
    let mut per_state = Vec::with_capacity(n);
    let mut per_state_se = Vec::with_capacity(n);
    let mut worst = (f64::NEG_INFINITY, 0.0);
    for start in 0..n {
        let sq = run_replicas(seed, n_replicas, |key| {
            let key = StreamKey::new(key.seed, (start * n_replicas) as u64 + key.replica);
            let mut index = IndexProcess::new(n, S::one(), Some(start), key)?;
            let mut acc = vec![S::zero(); dim];
            let mut now = S::zero();
            while now < horizon {
                let next = index.next_jump().min(horizon);
                let len = next - now;
                for (a, &gj) in acc.iter_mut().zip(&g[index.state()]) {
                    *a = *a + len * gj;
                }
                now = next;
                if now < horizon {
                    index.advance();
                }
            }
            Ok(norm_sq(&acc).as_f64())
        })?;
        let e = mean_estimate(&sq);
        per_state.push(e.mean);
        per_state_se.push(e.stderr);
        if e.mean > worst.0 {
            worst = (e.mean, e.stderr);
        }
    }
    let canonical = format!("lemma3;g={:?};eta={};t={};n={}", g, eta, t, n_replicas);
    let mut r = VerifierReport::new("lemma3", worst.0, bound, worst.1, n * n_replicas, seed, &canonical);
    r.detail.insert("per_state_estimate".into(), per_state);
    r.detail.insert("per_state_stderr".into(), per_state_se);
    Ok(r)
}

fn grid_position<S: Real>(times: &[S], t: S) -> Option<usize> {
    let tol = S::lit(1e-9) * t.abs().max(S::one());
    let k = times.partition_point(|&s| s < t - tol);
    (k < times.len() && (times[k] - t).abs() <= tol).then_some(k)
}

/// Checks that `t ↦ E[e^{ct}F(r_t)]` is non-increasing on `time_grid` for the
/// given coupled runs. Each consecutive comparison uses the paired difference
/// across runs and allows two standard errors.
pub fn supermartingale_check<S: Real>(
    coupled_runs: &[CoupledTrajectory<S>],
    c: S,
    time_grid: &[S],
    seed: u64,
) -> Result<VerifierReport> {
    if coupled_runs.is_empty() {
        return invalid("no coupled runs supplied");
    }
    if time_grid.is_empty() {
        return invalid("time grid is empty");
    }
    if time_grid.windows(2).any(|w| !(w[0] < w[1])) {
        return invalid("time grid must be strictly increasing");
    }
    let mut values = vec![Vec::with_capacity(coupled_runs.len()); time_grid.len()];
    for (run_id, run) in coupled_runs.iter().enumerate() {
        for (j, &t) in time_grid.iter().enumerate() {
            let k = grid_position(run.times(), t)
                .ok_or_else(|| crate::Error::InvalidParameter(format!("run {run_id} has no grid point at t = {t}")))?;
            values[j].push(((c * t).exp() * run.f_of_r[k]).as_f64());
        }
    }
    let means: Vec<f64> = values.iter().map(|v| mean_estimate(v).mean).collect();
    let ses: Vec<f64> = values.iter().map(|v| mean_estimate(v).stderr).collect();
    let mut increments = Vec::new();
    let mut inc_se = Vec::new();
    let mut worst = (f64::NEG_INFINITY, 0.0);
    let mut passed = true;
    for j in 1..time_grid.len() {
        let diff: Vec<f64> = values[j].iter().zip(&values[j - 1]).map(|(a, b)| a - b).collect();
        let e = mean_estimate(&diff);
        if e.mean > TOLERANCE_SE * e.stderr {
            passed = false;
        }
        if e.mean - TOLERANCE_SE * e.stderr > worst.0 - TOLERANCE_SE * worst.1 {
            worst = (e.mean, e.stderr);
        }
        increments.push(e.mean);
        inc_se.push(e.stderr);
    }
    if time_grid.len() == 1 {
        worst = (0.0, 0.0);
    }
    let canonical = format!(
        "supermartingale;c={};grid={:?};runs={}",
        c,
        time_grid.iter().map(|t| t.as_f64()).collect::<Vec<_>>(),
        coupled_runs.len()
    );
    let mut r = VerifierReport::new("supermartingale", worst.0, 0.0, worst.1, coupled_runs.len(), seed, &canonical);
    r.passed = passed;
    r.detail.insert("time".into(), time_grid.iter().map(|t| t.as_f64()).collect());
    r.detail.insert("mean".into(), means);
    r.detail.insert("stderr".into(), ses);
    r.detail.insert("increment".into(), increments);
    r.detail.insert("increment_stderr".into(), inc_se);
    Ok(r)
}

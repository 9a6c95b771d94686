//! Euler–Maruyama simulators for the switched diffusion, the limiting
//! Langevin diffusion, and the discrete ULA and SGLD chains.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Result};
use crate::potentials::PotentialFamily;
use crate::rng::{Purpose, StreamKey};
use crate::scalar::Real;

use super::grid::{check_finite, records_initial, records_node, validate_grid, walk, Event};
use super::index::IndexProcess;
use super::trajectory::{Record, Trajectory};

/// Discretisation and output options for the continuous-time simulators.
#[derive(Debug, Clone, PartialEq)]
pub struct SimOptions<S> {
    pub horizon: S,
    pub dt: S,
    pub record: Record<S>,
    /// Fixed initial component; `None` draws it uniformly.
    pub initial_index: Option<usize>,
    /// Log step-size warnings.
    pub warn: bool,
}

impl<S: Real> SimOptions<S> {
    pub fn new(horizon: S, dt: S) -> Self {
        Self {
            horizon,
            dt,
            record: Record::All,
            initial_index: None,
            warn: true,
        }
    }

    pub fn record(mut self, record: Record<S>) -> Self {
        self.record = record;
        self
    }

    pub fn initial_index(mut self, i: usize) -> Self {
        self.initial_index = Some(i);
        self
    }

    pub fn quiet(mut self) -> Self {
        self.warn = false;
        self
    }
}

/// Default step size.
pub const DEFAULT_DT: f64 = 1e-3;

/// Euler–Maruyama update `x ← x − g·h + noise`.
#[inline]
pub(crate) fn em_update<S: Real>(x: &mut [S], g: &[S], h: S, noise: &[S]) {
    for ((xj, &gj), &nj) in x.iter_mut().zip(g).zip(noise) {
        *xj = *xj - gj * h + nj;
    }
}

/// Fills `out` with `√(2h)·ξ`, `ξ` standard Gaussian.
#[inline]
pub(crate) fn draw_noise<S: Real, R: Rng + ?Sized>(rng: &mut R, h: S, out: &mut [S]) {
    let scale = (S::lit(2.0) * h).sqrt();
    for o in out.iter_mut() {
        *o = scale * S::standard_normal(rng);
    }
}

pub(crate) fn check_start<S: Real>(family: &PotentialFamily<S>, x0: &[S]) -> Result<()> {
    if x0.len() != family.dim() {
        return invalid(format!(
            "initial point has dimension {}, family has {}",
            x0.len(),
            family.dim()
        ));
    }
    if x0.iter().any(|v| !v.is_finite()) {
        return invalid("initial point must be finite");
    }
    Ok(())
}

pub(crate) fn warn_step_size<S: Real>(family: &PotentialFamily<S>, eta: Option<S>, dt: S) {
    if let Some(eta) = eta {
        let mean_wait = eta / S::from_usize_lossy(family.n_components());
        if family.n_components() > 1 && dt > mean_wait {
            log::warn!("dt = {dt} exceeds the mean redraw gap eta/N = {mean_wait}");
        }
    }
    let l = family.declared_l();
    if l > S::zero() && dt > S::one() / (S::lit(2.0) * l) {
        log::warn!("dt = {dt} exceeds the stability limit 1/(2L) = {}", S::one() / (S::lit(2.0) * l));
    }
}

pub(crate) fn capacity_hint<S: Real>(opts: &SimOptions<S>) -> usize {
    match &opts.record {
        Record::All => (opts.horizon / opts.dt).to_usize().unwrap_or(0).saturating_add(2),
        Record::Stride(s) => (opts.horizon / opts.dt).to_usize().unwrap_or(0) / s + 2,
        Record::Times(ts) => ts.len(),
        Record::Final => 1,
    }
    .min(1 << 24)
}

/// `dθ = −∇Φ_{𝒊(t/η)}(θ) dt + √2 dW`, with the grid refined at every jump of the index.
pub fn simulate_sgldiff<S: Real>(
    family: &PotentialFamily<S>,
    eta: S,
    x0: &[S],
    horizon: S,
    dt: S,
    seed: impl Into<StreamKey>,
) -> Result<Trajectory<S>> {
    simulate_sgldiff_with(family, eta, x0, &SimOptions::new(horizon, dt), seed)
}

pub fn simulate_sgldiff_with<S: Real>(
    family: &PotentialFamily<S>,
    eta: S,
    x0: &[S],
    opts: &SimOptions<S>,
    seed: impl Into<StreamKey>,
) -> Result<Trajectory<S>> {
    let key = seed.into();
    check_start(family, x0)?;
    validate_grid(opts.horizon, opts.dt, &opts.record)?;
    let mut index = IndexProcess::new(family.n_components(), eta, opts.initial_index, key)?;
    if opts.warn {
        warn_step_size(family, Some(eta), opts.dt);
    }
    let d = family.dim();
    let mut noise_rng = key.rng(Purpose::Diffusion);
    let mut x = x0.to_vec();
    let mut g = vec![S::zero(); d];
    let mut noise = vec![S::zero(); d];
    let mut traj = Trajectory::with_capacity(d, capacity_hint(opts), true);
    traj.seed = key.seed;
    traj.replica = key.replica;
    if records_initial(&opts.record, opts.horizon) {
        traj.push(S::zero(), &x, Some(index.state()));
    }
    walk(opts.horizon, opts.dt, &opts.record, Some(&mut index), |ev| {
        match ev {
            Event::Step { idx, t, h } => {
                family.grad_into(idx, &x, &mut g);
                draw_noise(&mut noise_rng, h, &mut noise);
                em_update(&mut x, &g, h, &noise);
                check_finite(&x, t + h)?;
            }
            Event::Node { node, idx } => {
                if records_node(&opts.record, node) {
                    traj.push(node.t, &x, Some(idx));
                }
            }
        }
        Ok(())
    })?;
    Ok(traj)
}

/// `dζ = −∇Φ̄(ζ) dt + √2 dW` on the uniform grid.
pub fn simulate_langevin<S: Real>(
    family: &PotentialFamily<S>,
    x0: &[S],
    horizon: S,
    dt: S,
    seed: impl Into<StreamKey>,
) -> Result<Trajectory<S>> {
    simulate_langevin_with(family, x0, &SimOptions::new(horizon, dt), seed)
}

pub fn simulate_langevin_with<S: Real>(
    family: &PotentialFamily<S>,
    x0: &[S],
    opts: &SimOptions<S>,
    seed: impl Into<StreamKey>,
) -> Result<Trajectory<S>> {
    let key = seed.into();
    check_start(family, x0)?;
    validate_grid(opts.horizon, opts.dt, &opts.record)?;
    if opts.warn {
        warn_step_size(family, None, opts.dt);
    }
    let d = family.dim();
    let mut noise_rng = key.rng(Purpose::Diffusion);
    let mut x = x0.to_vec();
    let mut g = vec![S::zero(); d];
    let mut scratch = vec![S::zero(); d];
    let mut noise = vec![S::zero(); d];
    let mut traj = Trajectory::with_capacity(d, capacity_hint(opts), false);
    traj.seed = key.seed;
    traj.replica = key.replica;
    if records_initial(&opts.record, opts.horizon) {
        traj.push(S::zero(), &x, None);
    }
    walk(opts.horizon, opts.dt, &opts.record, None, |ev| {
        match ev {
            Event::Step { t, h, .. } => {
                family.mean_gradient_into(&x, &mut g, &mut scratch);
                draw_noise(&mut noise_rng, h, &mut noise);
                em_update(&mut x, &g, h, &noise);
                check_finite(&x, t + h)?;
            }
            Event::Node { node, .. } => {
                if records_node(&opts.record, node) {
                    traj.push(node.t, &x, None);
                }
            }
        }
        Ok(())
    })?;
    Ok(traj)
}

/// Test hooks for the discrete chains.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ChainHooks {
    /// Replace every `ξ_k` by zero.
    pub zero_noise: bool,
    /// Use these component indices (cycled) instead of uniform draws (SGLD only).
    pub forced_indices: Option<Vec<usize>>,
}

/// Output options for the discrete chains.
#[derive(Debug, Clone, PartialEq)]
pub enum ChainRecord {
    All,
    Stride(usize),
    Final,
}

#[allow(clippy::too_many_arguments)]
fn run_chain<S: Real>(
    family: &PotentialFamily<S>,
    step: S,
    x0: &[S],
    n_steps: usize,
    key: StreamKey,
    record: &ChainRecord,
    hooks: &ChainHooks,
    subsample: bool,
) -> Result<Trajectory<S>> {
    check_start(family, x0)?;
    if !(step > S::zero() && step.is_finite()) {
        return invalid(format!("step must be positive, got {step}"));
    }
    if matches!(record, ChainRecord::Stride(0)) {
        return invalid("record stride must be positive");
    }
    if let Some(f) = &hooks.forced_indices {
        if f.is_empty() || f.iter().any(|&i| i >= family.n_components()) {
            return invalid("forced indices must be non-empty and in range");
        }
    }
    let d = family.dim();
    let n = family.n_components();
    let mut noise_rng = key.rng(Purpose::Diffusion);
    let mut index_rng: ChaCha8Rng = key.rng(Purpose::ChainIndex);
    let mut x = x0.to_vec();
    let mut g = vec![S::zero(); d];
    let mut scratch = vec![S::zero(); d];
    let mut noise = vec![S::zero(); d];
    let cap = match record {
        ChainRecord::All => n_steps + 1,
        ChainRecord::Stride(s) => n_steps / s + 2,
        ChainRecord::Final => 1,
    };
    let mut traj = Trajectory::with_capacity(d, cap.min(1 << 24), subsample);
    traj.seed = key.seed;
    traj.replica = key.replica;
    let keep = |k: usize| match record {
        ChainRecord::All => true,
        ChainRecord::Stride(s) => k.is_multiple_of(*s) || k == n_steps,
        ChainRecord::Final => k == n_steps,
    };
    let pick = |k: usize, rng: &mut ChaCha8Rng| match &hooks.forced_indices {
        Some(f) => f[k % f.len()],
        None => rng.random_range(0..n),
    };
    let mut idx = if subsample { pick(0, &mut index_rng) } else { 0 };
    if keep(0) {
        traj.push(S::zero(), &x, subsample.then_some(idx));
    }
    for k in 0..n_steps {
        if subsample {
            family.grad_into(idx, &x, &mut g);
        } else {
            family.mean_gradient_into(&x, &mut g, &mut scratch);
        }
        if hooks.zero_noise {
            noise.iter_mut().for_each(|v| *v = S::zero());
        } else {
            draw_noise(&mut noise_rng, step, &mut noise);
        }
        em_update(&mut x, &g, step, &noise);
        let t = S::from_usize_lossy(k + 1) * step;
        check_finite(&x, t)?;
        if subsample {
            idx = pick(k + 1, &mut index_rng);
        }
        if keep(k + 1) {
            traj.push(t, &x, subsample.then_some(idx));
        }
    }
    Ok(traj)
}

/// Unadjusted Langevin algorithm `ζ̂_{k+1} = ζ̂_k − η∇Φ̄(ζ̂_k) + √(2η) ξ_k`.
pub fn ula_chain<S: Real>(
    family: &PotentialFamily<S>,
    step: S,
    x0: &[S],
    n_steps: usize,
    seed: impl Into<StreamKey>,
) -> Result<Trajectory<S>> {
    ula_chain_with(family, step, x0, n_steps, seed, &ChainRecord::All, &ChainHooks::default())
}

pub fn ula_chain_with<S: Real>(
    family: &PotentialFamily<S>,
    step: S,
    x0: &[S],
    n_steps: usize,
    seed: impl Into<StreamKey>,
    record: &ChainRecord,
    hooks: &ChainHooks,
) -> Result<Trajectory<S>> {
    run_chain(family, step, x0, n_steps, seed.into(), record, hooks, false)
}

/// Stochastic gradient Langevin dynamics: as ULA but with a fresh uniformly
/// drawn component gradient at every step.
pub fn sgld_chain<S: Real>(
    family: &PotentialFamily<S>,
    step: S,
    x0: &[S],
    n_steps: usize,
    seed: impl Into<StreamKey>,
) -> Result<Trajectory<S>> {
    sgld_chain_with(family, step, x0, n_steps, seed, &ChainRecord::All, &ChainHooks::default())
}

pub fn sgld_chain_with<S: Real>(
    family: &PotentialFamily<S>,
    step: S,
    x0: &[S],
    n_steps: usize,
    seed: impl Into<StreamKey>,
    record: &ChainRecord,
    hooks: &ChainHooks,
) -> Result<Trajectory<S>> {
    run_chain(family, step, x0, n_steps, seed.into(), record, hooks, true)
}

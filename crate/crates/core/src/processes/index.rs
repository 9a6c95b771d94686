//! The index process `𝒊(t/η)`: a continuous-time Markov chain on
//! `{0, …, N−1}` that jumps to each other state at rate `1/η` (θ-time).
//!
//! It is simulated as redraw events at total rate `N/η` whose target is
//! uniform on all `N` states; redraws that land on the current state are
//! collapsed. This has generator `q_jk = 1/η` for `k ≠ j`.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::rng::{Purpose, StreamKey};
use crate::scalar::Real;

/// Streaming sampler of the index process; yields visible jumps one at a time.
#[derive(Debug, Clone)]
pub struct IndexProcess<S: Real> {
    n: usize,
    mean_redraw_gap: S,
    state: usize,
    next_jump: S,
    next_state: usize,
    rng: ChaCha8Rng,
}

impl<S: Real> IndexProcess<S> {
    /// Starts at `initial` or, when `None`, at a uniformly drawn state.
    pub fn new(n: usize, eta: S, initial: Option<usize>, key: StreamKey) -> Result<Self> {
        if n == 0 {
            return invalid("index process needs at least one state");
        }
        if !(eta > S::zero() && eta.is_finite()) {
            return invalid(format!("eta must be positive and finite, got {eta}"));
        }
        let mut rng = key.rng(Purpose::IndexJumps);
        let state = match initial {
            Some(s) if s < n => s,
            Some(s) => return invalid(format!("initial state {s} outside 0..{n}")),
            None => rng.random_range(0..n),
        };
        let mut p = Self {
            n,
            mean_redraw_gap: eta / S::from_usize_lossy(n),
            state,
            next_jump: S::zero(),
            next_state: state,
            rng,
        };
        p.schedule_from(S::zero());
        Ok(p)
    }

    fn schedule_from(&mut self, mut t: S) {
        if self.n == 1 {
            self.next_jump = S::infinity();
            return;
        }
        loop {
            t = t + S::exp1(&mut self.rng) * self.mean_redraw_gap;
            let target = self.rng.random_range(0..self.n);
            if target != self.state {
                self.next_jump = t;
                self.next_state = target;
                return;
            }
        }
    }

    pub fn n_states(&self) -> usize {
        self.n
    }

    pub fn state(&self) -> usize {
        self.state
    }

    /// Time of the next visible jump (`+∞` for a single state).
    pub fn next_jump(&self) -> S {
        self.next_jump
    }

    /// Performs the pending jump and schedules the following one.
    pub fn advance(&mut self) {
        let t = self.next_jump;
        self.state = self.next_state;
        self.schedule_from(t);
    }
}

/// A realisation of the index process on `[0, horizon]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Real")]
pub struct IndexProcessPath<S: Real> {
    /// `jump_times[0] = 0`; `states[k]` is active on `[jump_times[k], jump_times[k+1])`.
    pub jump_times: Vec<S>,
    pub states: Vec<usize>,
    pub eta: S,
    pub n_components: usize,
    pub horizon: S,
}

impl<S: Real> IndexProcessPath<S> {
    pub fn state_at(&self, t: S) -> usize {
        let k = self.jump_times.partition_point(|&s| s <= t);
        self.states[k.saturating_sub(1)]
    }

    pub fn n_switches(&self) -> usize {
        self.states.len() - 1
    }

    /// Fraction of `[0, horizon]` spent in each state.
    pub fn occupation(&self) -> Vec<S> {
        let mut occ = vec![S::zero(); self.n_components];
        for (k, &s) in self.states.iter().enumerate() {
            let end = self.jump_times.get(k + 1).copied().unwrap_or(self.horizon);
            occ[s] = occ[s] + (end - self.jump_times[k]);
        }
        occ.iter_mut().for_each(|o| *o = *o / self.horizon);
        occ
    }
}

pub fn sample_index_path<S: Real>(
    n_components: usize,
    eta: S,
    horizon: S,
    seed: impl Into<StreamKey>,
) -> Result<IndexProcessPath<S>> {
    sample_index_path_from(n_components, eta, horizon, None, seed)
}

pub fn sample_index_path_from<S: Real>(
    n_components: usize,
    eta: S,
    horizon: S,
    initial: Option<usize>,
    seed: impl Into<StreamKey>,
) -> Result<IndexProcessPath<S>> {
    if !(horizon > S::zero() && horizon.is_finite()) {
        return invalid(format!("horizon must be positive and finite, got {horizon}"));
    }
    let mut p = IndexProcess::new(n_components, eta, initial, seed.into())?;
    let mut jump_times = vec![S::zero()];
    let mut states = vec![p.state()];
    while p.next_jump() <= horizon {
        jump_times.push(p.next_jump());
        p.advance();
        states.push(p.state());
    }
    Ok(IndexProcessPath {
        jump_times,
        states,
        eta,
        n_components,
        horizon,
    })
}

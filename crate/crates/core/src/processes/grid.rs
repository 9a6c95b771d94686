//! Refined time grid shared by the continuous-time simulators.
//!
//! Steps end at the next of: the uniform node `(k+1)·dt`, the next index
//! jump, the next requested record time, or the horizon. Every step therefore
//! sees a single active component, and the step lengths sum to the horizon.

use crate::error::{invalid, Error, Result};
use crate::scalar::Real;

use super::index::IndexProcess;
use super::trajectory::Record;

#[derive(Debug, Clone, Copy)]
pub(crate) struct Node<S> {
    pub t: S,
    pub on_grid: bool,
    pub grid_k: u64,
    pub on_record: bool,
    pub is_final: bool,
}

pub(crate) enum Event<'a, S> {
    /// Advance the state over `[t, t + h]` with component `idx` active.
    Step { idx: usize, t: S, h: S },
    /// Arrived at a node; `idx` is the component active from here on.
    Node { node: &'a Node<S>, idx: usize },
}

pub(crate) fn validate_grid<S: Real>(horizon: S, dt: S, record: &Record<S>) -> Result<()> {
    if !(horizon >= S::zero() && horizon.is_finite()) {
        return invalid(format!("horizon must be finite and nonnegative, got {horizon}"));
    }
    if !(dt > S::zero() && dt.is_finite()) {
        return invalid(format!("dt must be positive, got {dt}"));
    }
    match record {
        Record::Stride(0) => invalid("record stride must be positive"),
        Record::Times(ts) => {
            if ts.iter().any(|&t| !(t >= S::zero() && t <= horizon)) {
                return invalid("record times must lie in [0, horizon]");
            }
            if ts.windows(2).any(|w| !(w[0] < w[1])) {
                return invalid("record times must be strictly increasing");
            }
            Ok(())
        }
        _ => Ok(()),
    }
}

/// Whether the initial state at `t = 0` is recorded.
pub(crate) fn records_initial<S: Real>(record: &Record<S>, horizon: S) -> bool {
    match record {
        Record::All | Record::Stride(_) => true,
        Record::Times(ts) => ts.first().is_some_and(|&t| t == S::zero()),
        Record::Final => horizon == S::zero(),
    }
}

pub(crate) fn records_node<S: Real>(record: &Record<S>, node: &Node<S>) -> bool {
    match record {
        Record::All => true,
        Record::Stride(s) => (node.on_grid && node.grid_k.is_multiple_of(*s as u64)) || node.is_final,
        Record::Times(_) => node.on_record,
        Record::Final => node.is_final,
    }
}

/// Walks the refined grid on `[0, horizon]`, calling `f` for each step and node.
pub(crate) fn walk<S: Real, F>(
    horizon: S,
    dt: S,
    record: &Record<S>,
    mut index: Option<&mut IndexProcess<S>>,
    mut f: F,
) -> Result<()>
where
    F: FnMut(Event<'_, S>) -> Result<()>,
{
    let snap = dt * S::lit(1e-9);
    let record_times: &[S] = match record {
        Record::Times(ts) => ts,
        _ => &[],
    };
    let mut rec_pos = record_times.partition_point(|&t| t <= S::zero());
    let mut t = S::zero();
    let mut k: u64 = 0;
    while t < horizon {
        let mut next_grid = S::from_u64(k + 1).expect("grid counter") * dt;
        if next_grid > horizon || horizon - next_grid <= snap {
            next_grid = horizon;
        }
        let next_jump = index.as_ref().map_or(S::infinity(), |p| p.next_jump());
        let next_rec = record_times.get(rec_pos).copied().unwrap_or(S::infinity());
        let t_next = next_grid.min(next_jump).min(next_rec);
        let idx = index.as_ref().map_or(0, |p| p.state());
        f(Event::Step { idx, t, h: t_next - t })?;
        t = t_next;
        let on_grid = t == next_grid;
        if on_grid {
            k += 1;
        }
        if let Some(p) = index.as_mut() {
            // Several jumps can share a time only with probability zero, but loop anyway.
            while p.next_jump() <= t {
                p.advance();
            }
        }
        let on_record = t == next_rec;
        if on_record {
            rec_pos += 1;
        }
        let node = Node {
            t,
            on_grid,
            grid_k: k,
            on_record,
            is_final: t >= horizon,
        };
        let idx = index.as_ref().map_or(0, |p| p.state());
        f(Event::Node { node: &node, idx })?;
    }
    Ok(())
}

pub(crate) fn check_finite<S: Real>(x: &[S], t: S) -> Result<()> {
    if x.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::Divergence { time: t.as_f64() })
    }
}

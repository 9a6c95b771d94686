//! Replica-parallel Monte Carlo. Each replica gets its own substream family;
//! results come back ordered by replica id whatever the thread schedule.

use rayon::prelude::*;

use crate::error::Result;
use crate::rng::StreamKey;

/// Runs `f` for replicas `0..n` of `seed` in parallel, collecting in replica order.
pub fn run_replicas<T, F>(seed: u64, n: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(StreamKey) -> Result<T> + Sync + Send,
{
    (0..n as u64)
        .into_par_iter()
        .map(|rep| f(StreamKey::new(seed, rep)))
        .collect()
}

/// Like [`run_replicas`] but keeps failures per replica instead of aborting.
pub fn run_replicas_lenient<T, F>(seed: u64, n: usize, f: F) -> Vec<Result<T>>
where
    T: Send,
    F: Fn(StreamKey) -> Result<T> + Sync + Send,
{
    (0..n as u64)
        .into_par_iter()
        .map(|rep| f(StreamKey::new(seed, rep)))
        .collect()
}

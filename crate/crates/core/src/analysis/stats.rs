//! Sample moments and standard errors.

use serde::{Deserialize, Serialize};

use crate::scalar::Real;

/// A Monte Carlo mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Real")]
pub struct MeanEstimate<S> {
    pub mean: S,
    pub stderr: S,
    pub n: usize,
}

pub fn mean<S: Real>(xs: &[S]) -> S {
    if xs.is_empty() {
        return S::nan();
    }
    xs.iter().copied().sum::<S>() / S::from_usize_lossy(xs.len())
}

/// Unbiased sample variance; zero for fewer than two samples.
pub fn sample_variance<S: Real>(xs: &[S]) -> S {
    if xs.len() < 2 {
        return S::zero();
    }
    let m = mean(xs);
    xs.iter().map(|&x| (x - m) * (x - m)).sum::<S>() / S::from_usize_lossy(xs.len() - 1)
}

/// Mean and `sd/√n` for independent samples.
pub fn mean_estimate<S: Real>(xs: &[S]) -> MeanEstimate<S> {
    let n = xs.len();
    let stderr = if n < 2 {
        S::zero()
    } else {
        (sample_variance(xs) / S::from_usize_lossy(n)).sqrt()
    };
    MeanEstimate { mean: mean(xs), stderr, n }
}

/// Standard error of the mean of a correlated series by non-overlapping batch means.
pub fn batch_means_stderr<S: Real>(xs: &[S], n_batches: usize) -> S {
    let b = n_batches.max(2);
    let len = xs.len() / b;
    if len == 0 {
        return mean_estimate(xs).stderr;
    }
    let means: Vec<S> = xs.chunks_exact(len).take(b).map(mean).collect();
    mean_estimate(&means).stderr
}

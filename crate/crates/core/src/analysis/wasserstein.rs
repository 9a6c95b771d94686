//! Wasserstein-1 estimators between empirical measures and reference laws.
//!
//! In one dimension `W₁` is the integral of the absolute difference of the
//! quantile functions, which is exact for empirical measures. In higher
//! dimension the sliced estimator averages 1-D costs over random directions;
//! it is a proxy bounded above by `W₁`, not `W₁` itself. An exact assignment
//! solver is available for small equal-size samples as a cross-check.

use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{invalid, Result};
use crate::rng::{substream, Purpose};
use crate::scalar::{distance, Real};

use super::density::TargetDensity1D;
use super::stats::mean_estimate;

/// Largest sample size accepted by [`wasserstein1_exact`].
pub const EXACT_MATCHING_MAX: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WassersteinMethod {
    Exact1D,
    Sliced,
    QuantileVsGaussian,
    QuantileVsDensity,
    ExactMatching,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Real")]
pub struct WassersteinEstimate<S> {
    pub value: S,
    pub method: WassersteinMethod,
    pub n_a: usize,
    pub n_b: usize,
    pub n_projections: Option<usize>,
    pub stderr: Option<S>,
}

impl<S: Real> WassersteinEstimate<S> {
    fn new(value: S, method: WassersteinMethod, n_a: usize, n_b: usize) -> Self {
        Self {
            value,
            method,
            n_a,
            n_b,
            n_projections: None,
            stderr: None,
        }
    }
}

fn sorted_finite<S: Real>(xs: &[S], what: &str) -> Result<Vec<S>> {
    if xs.is_empty() {
        return invalid(format!("{what} is empty"));
    }
    if xs.iter().any(|x| !x.is_finite()) {
        return invalid(format!("{what} contains non-finite values"));
    }
    let mut v = xs.to_vec();
    v.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite values are ordered"));
    Ok(v)
}

/// Quantile-coupling cost of two sorted samples.
fn sorted_cost<S: Real>(a: &[S], b: &[S]) -> S {
    let (na, nb) = (a.len(), b.len());
    if na == nb {
        return a.iter().zip(b).map(|(&x, &y)| (x - y).abs()).sum::<S>() / S::from_usize_lossy(na);
    }
    // Walk the merged grid of breakpoints k/na and l/nb in exact integer arithmetic.
    let denom = S::from_usize_lossy(na) * S::from_usize_lossy(nb);
    let (mut i, mut j) = (0usize, 0usize);
    let mut pos: usize = 0; // current quantile level times na·nb
    let mut acc = S::zero();
    while i < na && j < nb {
        let ea = (i + 1) * nb;
        let eb = (j + 1) * na;
        let next = ea.min(eb);
        acc = acc + S::from_usize_lossy(next - pos) * (a[i] - b[j]).abs();
        pos = next;
        if ea == next {
            i += 1;
        }
        if eb == next {
            j += 1;
        }
    }
    acc / denom
}

/// Exact `W₁` between two 1-D empirical measures.
pub fn wasserstein1_1d<S: Real>(samples_a: &[S], samples_b: &[S]) -> Result<WassersteinEstimate<S>> {
    let a = sorted_finite(samples_a, "samples_a")?;
    let b = sorted_finite(samples_b, "samples_b")?;
    Ok(WassersteinEstimate::new(sorted_cost(&a, &b), WassersteinMethod::Exact1D, a.len(), b.len()))
}

/// Bootstrap summary of the 1-D empirical `W₁`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BootstrapW1<S> {
    /// Plug-in estimate on the original samples.
    pub estimate: S,
    /// Mean over bootstrap replicates.
    pub boot_mean: S,
    /// Standard deviation over bootstrap replicates.
    pub stderr: S,
}

impl<S: Real> BootstrapW1<S> {
    /// Bias-corrected estimate `2ŵ − mean(ŵ*)`. The plug-in `W₁` of two
    /// finite samples is biased upwards, markedly so when the laws coincide.
    pub fn debiased(&self) -> S {
        self.estimate + self.estimate - self.boot_mean
    }
}

/// Bootstrap of the 1-D empirical `W₁`, resampling both sides.
pub fn bootstrap_1d<S: Real>(samples_a: &[S], samples_b: &[S], n_boot: usize, seed: u64) -> Result<BootstrapW1<S>> {
    let a = sorted_finite(samples_a, "samples_a")?;
    let b = sorted_finite(samples_b, "samples_b")?;
    if n_boot < 2 {
        return invalid("n_boot must be at least 2");
    }
    let mut rng = substream(seed, Purpose::Bootstrap, 0);
    let mut ra = vec![S::zero(); a.len()];
    let mut rb = vec![S::zero(); b.len()];
    let mut vals = Vec::with_capacity(n_boot);
    for _ in 0..n_boot {
        for r in ra.iter_mut() {
            *r = samples_a[rng.random_range(0..samples_a.len())];
        }
        for r in rb.iter_mut() {
            *r = samples_b[rng.random_range(0..samples_b.len())];
        }
        ra.sort_unstable_by(|x, y| x.partial_cmp(y).expect("finite"));
        rb.sort_unstable_by(|x, y| x.partial_cmp(y).expect("finite"));
        vals.push(sorted_cost(&ra, &rb));
    }
    let e = mean_estimate(&vals);
    Ok(BootstrapW1 {
        estimate: sorted_cost(&a, &b),
        boot_mean: e.mean,
        stderr: e.stderr * S::from_usize_lossy(n_boot).sqrt(),
    })
}

/// Bootstrap standard error of the 1-D empirical `W₁`, resampling both sides.
pub fn bootstrap_stderr_1d<S: Real>(samples_a: &[S], samples_b: &[S], n_boot: usize, seed: u64) -> Result<S> {
    Ok(bootstrap_1d(samples_a, samples_b, n_boot, seed)?.stderr)
}

fn check_points<S: Real>(flat: &[S], dim: usize, what: &str) -> Result<usize> {
    if dim == 0 {
        return invalid("dimension must be positive");
    }
    if flat.is_empty() {
        return invalid(format!("{what} is empty"));
    }
    if !flat.len().is_multiple_of(dim) {
        return invalid(format!("{what} has {} values, not a multiple of dimension {dim}", flat.len()));
    }
    Ok(flat.len() / dim)
}

/// Sliced `W₁` between point clouds stored row-major with `dim` coordinates per point.
///
/// Averages the exact 1-D cost of the projections onto `n_projections`
/// uniformly random unit directions; `stderr` is the spread across directions.
/// In one dimension this is the exact 1-D cost.
pub fn wasserstein1_sliced<S: Real>(
    samples_a: &[S],
    samples_b: &[S],
    dim: usize,
    n_projections: usize,
    seed: u64,
) -> Result<WassersteinEstimate<S>> {
    let na = check_points(samples_a, dim, "samples_a")?;
    let nb = check_points(samples_b, dim, "samples_b")?;
    if n_projections == 0 {
        return invalid("n_projections must be positive");
    }
    if dim == 1 {
        let mut est = wasserstein1_1d(samples_a, samples_b)?;
        est.method = WassersteinMethod::Sliced;
        est.n_projections = Some(n_projections);
        est.stderr = Some(S::zero());
        return Ok(est);
    }
    let mut rng = substream(seed, Purpose::Projection, 0);
    let mut u = vec![S::zero(); dim];
    let mut costs = Vec::with_capacity(n_projections);
    let mut pa = vec![S::zero(); na];
    let mut pb = vec![S::zero(); nb];
    for _ in 0..n_projections {
        loop {
            u.iter_mut().for_each(|v| *v = S::standard_normal(&mut rng));
            let n = crate::scalar::norm(&u);
            if n > S::zero() {
                u.iter_mut().for_each(|v| *v = *v / n);
                break;
            }
        }
        let project = |flat: &[S], out: &mut [S]| {
            for (o, p) in out.iter_mut().zip(flat.chunks_exact(dim)) {
                *o = crate::scalar::dot(p, &u);
            }
        };
        project(samples_a, &mut pa);
        project(samples_b, &mut pb);
        let a = sorted_finite(&pa, "projected samples_a")?;
        let b = sorted_finite(&pb, "projected samples_b")?;
        costs.push(sorted_cost(&a, &b));
    }
    let e = mean_estimate(&costs);
    Ok(WassersteinEstimate {
        value: e.mean,
        method: WassersteinMethod::Sliced,
        n_a: na,
        n_b: nb,
        n_projections: Some(n_projections),
        stderr: Some(e.stderr),
    })
}

/// Midpoint-rule quantile cost `(1/n)Σ|x_(k) − Q((k+½)/n)|` against a quantile function.
fn quantile_cost<S: Real>(samples: &[S], quantile: impl Fn(f64) -> f64) -> Result<S> {
    let sorted = sorted_finite(samples, "samples")?;
    let n = sorted.len() as f64;
    let total: f64 = sorted
        .iter()
        .enumerate()
        .map(|(k, &x)| (x.as_f64() - quantile((k as f64 + 0.5) / n)).abs())
        .sum();
    Ok(S::lit(total / n))
}

/// `W₁` between a 1-D empirical measure and `N(mean, variance)`.
pub fn wasserstein1_vs_gaussian<S: Real>(samples: &[S], mean: S, variance: S) -> Result<WassersteinEstimate<S>> {
    if !(variance > S::zero() && variance.is_finite()) {
        return invalid(format!("variance must be positive, got {variance}"));
    }
    let normal = Normal::new(mean.as_f64(), variance.as_f64().sqrt())
        .map_err(|e| crate::Error::InvalidParameter(e.to_string()))?;
    let value = quantile_cost(samples, |p| normal.inverse_cdf(p))?;
    Ok(WassersteinEstimate::new(value, WassersteinMethod::QuantileVsGaussian, samples.len(), 0))
}

/// `W₁` between a 1-D empirical measure and a tabulated density.
pub fn wasserstein1_vs_density<S: Real>(samples: &[S], target: &TargetDensity1D<S>) -> Result<WassersteinEstimate<S>> {
    let value = quantile_cost(samples, |p| target.quantile(S::lit(p)).as_f64())?;
    Ok(WassersteinEstimate::new(value, WassersteinMethod::QuantileVsDensity, samples.len(), 0))
}

/// Exact `W₁` between two equal-size point clouds by optimal assignment (`n ≤ 256`).
pub fn wasserstein1_exact<S: Real>(samples_a: &[S], samples_b: &[S], dim: usize) -> Result<WassersteinEstimate<S>> {
    let na = check_points(samples_a, dim, "samples_a")?;
    let nb = check_points(samples_b, dim, "samples_b")?;
    if na != nb {
        return invalid(format!("exact matching needs equal sizes, got {na} and {nb}"));
    }
    if na > EXACT_MATCHING_MAX {
        return invalid(format!("exact matching limited to {EXACT_MATCHING_MAX} points, got {na}"));
    }
    let cost: Vec<f64> = samples_a
        .chunks_exact(dim)
        .flat_map(|p| samples_b.chunks_exact(dim).map(move |q| distance(p, q).as_f64()))
        .collect();
    let total = min_cost_assignment(&cost, na);
    Ok(WassersteinEstimate::new(S::lit(total / na as f64), WassersteinMethod::ExactMatching, na, nb))
}

/// Hungarian algorithm (shortest augmenting paths with potentials) on an `n×n` row-major cost matrix.
fn min_cost_assignment(cost: &[f64], n: usize) -> f64 {
    let inf = f64::INFINITY;
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    (1..=n).map(|j| cost[(p[j] - 1) * n + (j - 1)]).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn w(a: &[f64], b: &[f64]) -> f64 {
        wasserstein1_1d(a, b).unwrap().value
    }

    #[test]
    fn small_examples() {
        assert_eq!(w(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]), 0.0);
        assert_eq!(w(&[0.0], &[1.0]), 1.0);
        assert_eq!(w(&[0.0, 0.0], &[1.0, 3.0]), 2.0);
        assert!(wasserstein1_1d::<f64>(&[], &[1.0]).is_err());
        assert!(wasserstein1_1d(&[f64::NAN], &[1.0]).is_err());
    }

    #[test]
    fn unequal_sizes_use_merged_grid() {
        // {0} vs {0, 1}: half the mass moves by one.
        assert_eq!(w(&[0.0], &[0.0, 1.0]), 0.5);
        // {0,1,2} vs {0,3}: levels (0,1/3]→0, (1/3,1/2]→|1−0|, (1/2,2/3]→|1−3|, (2/3,1]→|2−3|.
        let want = 0.0 + (1.0 / 6.0) * 1.0 + (1.0 / 6.0) * 2.0 + (1.0 / 3.0) * 1.0;
        assert!((w(&[0.0, 1.0, 2.0], &[0.0, 3.0]) - want).abs() < 1e-15);
    }

    #[test]
    fn unequal_sizes_agree_with_replicated_equal_sizes() {
        let a = [0.3, -1.2, 2.5];
        let b = [1.0, 0.0];
        let a6: Vec<f64> = a.iter().flat_map(|&x| [x, x]).collect();
        let b6: Vec<f64> = b.iter().flat_map(|&x| [x, x, x]).collect();
        assert!((w(&a, &b) - w(&a6, &b6)).abs() < 1e-14);
    }

    #[test]
    fn sliced_in_one_dimension_is_exact() {
        let a = [0.1, 0.7, -0.4, 2.0];
        let b = [1.0, -3.0, 0.2, 0.25];
        for k in [1, 7, 100] {
            assert_eq!(wasserstein1_sliced(&a, &b, 1, k, 3).unwrap().value, w(&a, &b));
        }
    }

    #[test]
    fn sliced_translation_in_three_dimensions() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let a: Vec<f64> = (0..600).map(|_| rng.random::<f64>()).collect();
        let v = [0.6, 0.0, 0.8];
        let b: Vec<f64> = a.chunks(3).flat_map(|p| [p[0] + v[0], p[1] + v[1], p[2] + v[2]]).collect();
        let est = wasserstein1_sliced(&a, &b, 3, 1000, 5).unwrap();
        let se = est.stderr.unwrap();
        assert!((est.value - 0.5).abs() < 3.0 * se, "{} ± {}", est.value, se);
        assert_eq!(wasserstein1_sliced(&a, &a, 3, 50, 5).unwrap().value, 0.0);
        assert!(wasserstein1_sliced(&a, &b[..5], 3, 10, 5).is_err());
    }

    #[test]
    fn gaussian_reference() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        let sd = 0.1f64.sqrt();
        let xs: Vec<f64> = (0..100_000).map(|_| sd * f64::standard_normal(&mut rng)).collect();
        assert!(wasserstein1_vs_gaussian(&xs, 0.0, 0.1).unwrap().value < 0.005);
        let point = vec![0.0; 100_000];
        let mad = (2.0 * 0.1 / std::f64::consts::PI).sqrt();
        assert!((wasserstein1_vs_gaussian(&point, 0.0, 0.1).unwrap().value - mad).abs() < 1e-4);
        let shifted: Vec<f64> = xs.iter().map(|x| x + 50.0).collect();
        assert!((wasserstein1_vs_gaussian(&shifted, 0.0, 0.1).unwrap().value - 50.0).abs() < 0.01);
        assert!(wasserstein1_vs_gaussian(&xs, 0.0, 0.0).is_err());
    }

    #[test]
    fn exact_matching_agrees_in_one_dimension() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let a: Vec<f64> = (0..40).map(|_| rng.random::<f64>()).collect();
        let b: Vec<f64> = (0..40).map(|_| 2.0 * rng.random::<f64>() - 0.5).collect();
        let exact = wasserstein1_exact(&a, &b, 1).unwrap().value;
        assert!((exact - w(&a, &b)).abs() < 1e-12);
    }

    #[test]
    fn exact_matching_bounds_sliced() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        let a: Vec<f64> = (0..120).map(|_| f64::standard_normal(&mut rng)).collect();
        let b: Vec<f64> = (0..120).map(|_| 1.0 + f64::standard_normal(&mut rng)).collect();
        let exact = wasserstein1_exact(&a, &b, 2).unwrap().value;
        let sliced = wasserstein1_sliced(&a, &b, 2, 200, 1).unwrap().value;
        assert!(sliced <= exact + 1e-12);
    }

    #[test]
    fn bootstrap_stderr_is_positive_and_scales() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let a: Vec<f64> = (0..400).map(|_| f64::standard_normal(&mut rng)).collect();
        let b: Vec<f64> = (0..400).map(|_| 0.5 + f64::standard_normal(&mut rng)).collect();
        let se = bootstrap_stderr_1d(&a, &b, 200, 9).unwrap();
        assert!(se > 0.01 && se < 0.2, "{se}");
        let bs = bootstrap_1d(&a, &b, 200, 9).unwrap();
        assert_eq!(bs.stderr, se);
        assert_eq!(bs.estimate, w(&a, &b));
    }

    #[test]
    fn debiasing_lowers_the_same_law_floor() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(6);
        let (mut raw, mut deb) = (0.0, 0.0);
        let reps = 40;
        for k in 0..reps {
            let a: Vec<f64> = (0..2000).map(|_| f64::standard_normal(&mut rng)).collect();
            let b: Vec<f64> = (0..2000).map(|_| f64::standard_normal(&mut rng)).collect();
            let bs = bootstrap_1d(&a, &b, 50, k).unwrap();
            assert!(bs.boot_mean > bs.estimate * 0.5);
            raw += bs.estimate / reps as f64;
            deb += bs.debiased() / reps as f64;
        }
        assert!(deb > 0.0 && deb < 0.75 * raw, "raw {raw}, debiased {deb}");
    }

    proptest! {
        #[test]
        fn metric_axioms(
            a in proptest::collection::vec(-10.0f64..10.0, 12),
            b in proptest::collection::vec(-10.0f64..10.0, 12),
            c in proptest::collection::vec(-10.0f64..10.0, 12),
            s in -5.0f64..5.0,
        ) {
            prop_assert_eq!(w(&a, &a), 0.0);
            prop_assert!((w(&a, &b) - w(&b, &a)).abs() < 1e-12);
            prop_assert!(w(&a, &c) <= w(&a, &b) + w(&b, &c) + 1e-12);
            let a_s: Vec<f64> = a.iter().map(|x| x + s).collect();
            let b_s: Vec<f64> = b.iter().map(|x| x + s).collect();
            prop_assert!((w(&a_s, &b_s) - w(&a, &b)).abs() < 1e-12);
        }

        #[test]
        fn shift_costs_its_size(a in proptest::collection::vec(-10.0f64..10.0, 1..30), s in -5.0f64..5.0) {
            let a_s: Vec<f64> = a.iter().map(|x| x + s).collect();
            prop_assert!((w(&a, &a_s) - s.abs()).abs() < 1e-12);
        }
    }
}

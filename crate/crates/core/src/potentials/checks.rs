//! Sampling-based checkers for the regularity assumptions.
//!
//! The assumptions are analytic statements about all pairs of points; here
//! they are probed on random pairs drawn in an axis-aligned box and the most
//! violating ratio is reported together with the pair that produced it.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::rng::{substream, Purpose};
use crate::scalar::{distance, dot, Real};

use super::family::PotentialFamily;

/// Relative slack applied to every declared constant.
pub const EPS_CHECK: f64 = 1e-6;

/// Attempts per pair before giving up on finding points at least `R` apart.
const MAX_RETRIES: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AssumptionId {
    Lipschitz,
    ConvexAtInfinity,
    Dissipative,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Real")]
pub struct AssumptionReport<S: Real> {
    pub assumption_id: AssumptionId,
    pub passed: bool,
    /// Lipschitz: largest `‖Δ∇Φ‖/‖Δx‖`. Convexity at infinity: smallest
    /// `⟨Δ∇Φ, Δx⟩/‖Δx‖²`. Dissipativity: smallest margin `x·Φ′(x) − m x² + b`.
    pub worst_ratio: S,
    pub witness: Option<(Vec<S>, Vec<S>)>,
    pub n_samples: usize,
}

/// Axis-aligned box `[lo, hi]^d` in which test points are drawn.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleBox<S> {
    pub lo: S,
    pub hi: S,
}

impl<S: Real> SampleBox<S> {
    pub fn centered(radius: S) -> Self {
        Self { lo: -radius, hi: radius }
    }

    fn sample<R: Rng + ?Sized>(&self, dim: usize, rng: &mut R, out: &mut [S]) {
        debug_assert_eq!(out.len(), dim);
        for o in out.iter_mut() {
            *o = self.lo + (self.hi - self.lo) * S::unit(rng);
        }
    }
}

pub fn check_assumption1<S: Real>(
    family: &PotentialFamily<S>,
    n_pairs: usize,
    box_radius: S,
    seed: u64,
) -> Result<AssumptionReport<S>> {
    check_assumption1_in(family, n_pairs, SampleBox::centered(box_radius), seed)
}

/// Largest observed `‖∇Φ_i(x) − ∇Φ_i(y)‖ / ‖x − y‖` over components and pairs;
/// passes when it stays below `L (1 + ε)`.
pub fn check_assumption1_in<S: Real>(
    family: &PotentialFamily<S>,
    n_pairs: usize,
    region: SampleBox<S>,
    seed: u64,
) -> Result<AssumptionReport<S>> {
    validate(n_pairs, region)?;
    let d = family.dim();
    let mut rng = substream(seed, Purpose::Checker, 1);
    let (mut x, mut y) = (vec![S::zero(); d], vec![S::zero(); d]);
    let (mut gx, mut gy) = (vec![S::zero(); d], vec![S::zero(); d]);
    let mut worst = S::zero();
    let mut witness = None;
    for _ in 0..n_pairs {
        loop {
            region.sample(d, &mut rng, &mut x);
            region.sample(d, &mut rng, &mut y);
            if x != y {
                break;
            }
        }
        let dx = distance(&x, &y);
        for i in 0..family.n_components() {
            family.grad_into(i, &x, &mut gx);
            family.grad_into(i, &y, &mut gy);
            let ratio = distance(&gx, &gy) / dx;
            if ratio > worst || witness.is_none() {
                worst = ratio;
                witness = Some((x.clone(), y.clone()));
            }
        }
    }
    let passed = worst <= family.declared_l() * (S::one() + S::lit(EPS_CHECK));
    Ok(AssumptionReport {
        assumption_id: AssumptionId::Lipschitz,
        passed,
        worst_ratio: worst,
        witness,
        n_samples: n_pairs,
    })
}

pub fn check_assumption2<S: Real>(
    family: &PotentialFamily<S>,
    n_pairs: usize,
    box_radius: S,
    seed: u64,
) -> Result<AssumptionReport<S>> {
    if !(box_radius > family.declared_r()) {
        return invalid(format!(
            "box radius {box_radius} must exceed the declared R = {}",
            family.declared_r()
        ));
    }
    check_assumption2_in(family, n_pairs, SampleBox::centered(box_radius), seed)
}

/// Smallest observed `⟨∇Φ_i(x) − ∇Φ_i(y), x − y⟩ / ‖x − y‖²` over components
/// and pairs with `‖x − y‖ ≥ R`; passes when it stays above `K (1 − ε)`.
pub fn check_assumption2_in<S: Real>(
    family: &PotentialFamily<S>,
    n_pairs: usize,
    region: SampleBox<S>,
    seed: u64,
) -> Result<AssumptionReport<S>> {
    validate(n_pairs, region)?;
    let d = family.dim();
    let r = family.declared_r();
    let diagonal = (region.hi - region.lo) * S::from_usize_lossy(d).sqrt();
    if !(diagonal > r) {
        return invalid(format!("sampling box of diagonal {diagonal} cannot hold pairs {r} apart"));
    }
    let mut rng = substream(seed, Purpose::Checker, 2);
    let (mut x, mut y) = (vec![S::zero(); d], vec![S::zero(); d]);
    let (mut gx, mut gy) = (vec![S::zero(); d], vec![S::zero(); d]);
    let mut dx = vec![S::zero(); d];
    let mut dg = vec![S::zero(); d];
    let mut worst = S::infinity();
    let mut witness = None;
    for _ in 0..n_pairs {
        let mut found = false;
        for _ in 0..MAX_RETRIES {
            region.sample(d, &mut rng, &mut x);
            region.sample(d, &mut rng, &mut y);
            if distance(&x, &y) >= r {
                found = true;
                break;
            }
        }
        if !found {
            return Err(Error::SamplingFailure(format!(
                "no pair at distance >= {r} after {MAX_RETRIES} draws"
            )));
        }
        for ((o, &a), &b) in dx.iter_mut().zip(&x).zip(&y) {
            *o = a - b;
        }
        let dx2 = dot(&dx, &dx);
        for i in 0..family.n_components() {
            family.grad_into(i, &x, &mut gx);
            family.grad_into(i, &y, &mut gy);
            for ((o, &a), &b) in dg.iter_mut().zip(&gx).zip(&gy) {
                *o = a - b;
            }
            let ratio = dot(&dg, &dx) / dx2;
            if ratio < worst {
                worst = ratio;
                witness = Some((x.clone(), y.clone()));
            }
        }
    }
    let passed = worst >= family.declared_k() * (S::one() - S::lit(EPS_CHECK));
    Ok(AssumptionReport {
        assumption_id: AssumptionId::ConvexAtInfinity,
        passed,
        worst_ratio: worst,
        witness,
        n_samples: n_pairs,
    })
}

/// Checks `x·grad(x) ≥ m x² − b` on every grid point (one-dimensional).
///
/// Each point may miss by at most `ε (m x² + b)`. The reported `worst_ratio`
/// is the smallest margin `x·grad(x) − m x² + b`, with the offending point as
/// both witness coordinates.
pub fn check_dissipativeness<S: Real>(
    grad: impl Fn(S) -> S,
    m: S,
    b: S,
    grid: &[S],
) -> Result<AssumptionReport<S>> {
    if grid.is_empty() {
        return invalid("dissipativeness grid is empty");
    }
    if !(m > S::zero()) || b < S::zero() {
        return invalid(format!("need m > 0 and b >= 0, got m = {m}, b = {b}"));
    }
    let eps = S::lit(EPS_CHECK);
    let mut worst = S::infinity();
    let mut witness = None;
    let mut passed = true;
    for &x in grid {
        let margin = x * grad(x) - m * x * x + b;
        if margin < -eps * (m * x * x + b) {
            passed = false;
        }
        if margin < worst {
            worst = margin;
            witness = Some((vec![x], vec![x]));
        }
    }
    Ok(AssumptionReport {
        assumption_id: AssumptionId::Dissipative,
        passed,
        worst_ratio: worst,
        witness,
        n_samples: grid.len(),
    })
}

fn validate<S: Real>(n_pairs: usize, region: SampleBox<S>) -> Result<()> {
    if n_pairs == 0 {
        return invalid("n_pairs must be at least 1");
    }
    if !(region.hi > region.lo) || !region.lo.is_finite() || !region.hi.is_finite() {
        return invalid(format!("empty sampling box [{}, {}]", region.lo, region.hi));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::builtins::{appendix_c_derivative, appendix_c_family, quadratic, trig};

    fn fig2() -> PotentialFamily<f64> {
        quadratic(&[5.0, 15.0], &[5.0, -5.0 / 3.0], 1).unwrap()
    }

    #[test]
    fn lipschitz_ratio_of_quadratic_is_max_curvature() {
        let rep = check_assumption1(&fig2(), 10_000, 10.0, 1).unwrap();
        assert!(rep.passed);
        assert!((rep.worst_ratio - 15.0).abs() < 1e-9, "{}", rep.worst_ratio);
        assert_eq!(rep.n_samples, 10_000);
        assert!(rep.witness.is_some());
    }

    #[test]
    fn under_declared_lipschitz_constant_fails() {
        let fam = fig2().with_lipschitz(14.0).unwrap();
        let rep = check_assumption1(&fam, 1_000, 10.0, 1).unwrap();
        assert!(!rep.passed);
        assert!((rep.worst_ratio - 15.0).abs() < 1e-9);
    }

    #[test]
    fn trig_lipschitz_bounded_by_two() {
        for dim in [1, 3] {
            let rep = check_assumption1(&trig(&[0.0, 1.5], dim).unwrap(), 10_000, 10.0, 3).unwrap();
            assert!(rep.passed && rep.worst_ratio <= 2.0, "{rep:?}");
        }
    }

    #[test]
    fn quadratic_is_convex_at_infinity() {
        let rep = check_assumption2(&fig2(), 10_000, 10.0, 2).unwrap();
        assert!(rep.passed);
        assert!(rep.worst_ratio >= 5.0 - 1e-9);
    }

    #[test]
    fn trig_is_convex_at_infinity() {
        for dim in [1, 2, 5] {
            let fam = trig(&[0.0, -2.0], dim).unwrap();
            let rep = check_assumption2(&fam, 10_000, 20.0, 5).unwrap();
            assert!(rep.passed, "dim {dim}: {rep:?}");
        }
    }

    #[test]
    fn trig_one_dimensional_grid_oracle() {
        // Exhaustive grid of 10⁴ pairs: x, y on a 100-point lattice in [-20, 20].
        let fam = trig(&[0.0], 1).unwrap();
        let pts: Vec<f64> = (0..100).map(|k| -20.0 + 40.0 * k as f64 / 99.0).collect();
        let mut worst = f64::INFINITY;
        for &x in &pts {
            for &y in &pts {
                if (x - y).abs() >= 4.0 {
                    let g = fam.grad(0, &[x])[0] - fam.grad(0, &[y])[0];
                    worst = worst.min(g * (x - y) / ((x - y) * (x - y)));
                }
            }
        }
        assert!(worst >= 0.5);
        let rep = check_assumption2(&fam, 10_000, 20.0, 9).unwrap();
        assert!(rep.passed && rep.worst_ratio >= 0.5 * (1.0 - EPS_CHECK));
    }

    #[test]
    fn appendix_c_plateau_breaks_convexity_at_infinity() {
        let fam = appendix_c_family(0.1, 1.0).unwrap();
        let lo = 256.0;
        let hi = 256.0 + 8f64.ln();
        let rep = check_assumption2_in(&fam, 1_000, SampleBox { lo, hi }, 4).unwrap();
        assert!(!rep.passed);
        assert_eq!(rep.worst_ratio, 0.0);
        let (x, y) = rep.witness.unwrap();
        assert!((x[0] - y[0]).abs() >= 1.0);
    }

    #[test]
    fn assumption2_requires_room_for_far_pairs() {
        assert!(check_assumption2(&trig::<f64>(&[0.0], 1).unwrap(), 10, 3.0, 0).is_err());
        let fam = quadratic(&[1.0], &[0.0], 1).unwrap().with_radius(1.0).unwrap();
        let err = check_assumption2_in(&fam, 10, SampleBox { lo: 0.0, hi: 0.5 }, 0).unwrap_err();
        assert!(matches!(err, Error::InvalidParameter(_)));
    }

    #[test]
    fn assumption2_sampling_failure_is_reported() {
        // Box diagonal barely exceeds R: far pairs exist but are vanishingly rare.
        let fam = quadratic(&[1.0], &[0.0], 1).unwrap().with_radius(0.999_999_9).unwrap();
        let err = check_assumption2_in(&fam, 10, SampleBox { lo: 0.0, hi: 1.0 }, 0).unwrap_err();
        assert!(matches!(err, Error::SamplingFailure(_)));
    }

    #[test]
    fn dissipativeness_of_appendix_c() {
        let r = 1024.0;
        let grid: Vec<f64> = (0..4096).map(|k| -r + 2.0 * r * k as f64 / 4095.0).collect();
        let rep = check_dissipativeness(appendix_c_derivative(), 0.5, 0.0, &grid).unwrap();
        assert!(rep.passed, "{rep:?}");
    }

    #[test]
    fn dissipativeness_simple_cases() {
        let grid: Vec<f64> = (-50..=50).map(|k| k as f64 / 5.0).collect();
        let rep = check_dissipativeness(|x: f64| x, 1.0, 0.0, &grid).unwrap();
        assert!(rep.passed);
        assert_eq!(rep.worst_ratio, 0.0);
        let rep = check_dissipativeness(|x: f64| -x, 0.1, 0.0, &[1.0]).unwrap();
        assert!(!rep.passed);
        assert!(check_dissipativeness(|x: f64| x, 1.0, 0.0, &[]).is_err());
    }

    #[test]
    fn checks_are_deterministic() {
        let a = check_assumption1(&fig2(), 100, 3.0, 11).unwrap();
        let b = check_assumption1(&fig2(), 100, 3.0, 11).unwrap();
        assert_eq!(a, b);
    }
}

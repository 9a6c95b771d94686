//! Normalised 1-D target density `μ(x) = e^{−Φ̄(x)}/Z` tabulated on an interval.
//!
//! `Φ̄` is recovered from the mean gradient by Simpson's rule cell by cell
//! (exact when `∇Φ̄` is linear), anchored at its minimum on the grid.

use crate::error::{invalid, Error, Result};
use crate::potentials::PotentialFamily;
use crate::scalar::Real;

/// Number of grid cells used to tabulate the density.
pub const DENSITY_GRID_CELLS: usize = 1 << 16;
/// Number of entries of the quantile table.
pub const QUANTILE_TABLE_SIZE: usize = 4096;
/// The density at the interval ends must be below this fraction of its maximum.
pub const TAIL_FRACTION: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct TargetDensity1D<S> {
    lo: S,
    hi: S,
    xs: Vec<S>,
    /// `Φ̄(x_k) − min Φ̄`.
    potential: Vec<S>,
    density: Vec<S>,
    cdf: Vec<S>,
    log_z: S,
    quantile_table: Vec<(S, S)>,
}

/// Tabulates the target of a one-dimensional family on `[domain.0, domain.1]`.
pub fn build_target_density_1d<S: Real>(family: &PotentialFamily<S>, domain: (S, S)) -> Result<TargetDensity1D<S>> {
    if family.dim() != 1 {
        return invalid(format!("target density needs dimension 1, family has {}", family.dim()));
    }
    let (lo, hi) = domain;
    if !(lo < hi && lo.is_finite() && hi.is_finite()) {
        return invalid(format!("invalid domain [{lo}, {hi}]"));
    }
    let mut scratch = [S::zero()];
    let mut g = [S::zero()];
    let mut grad = |x: S| {
        family.mean_gradient_into(&[x], &mut g, &mut scratch);
        g[0]
    };
    TargetDensity1D::from_gradient(&mut grad, lo, hi)
}

impl<S: Real> TargetDensity1D<S> {
    /// Builds the density from `∇Φ̄` on `[lo, hi]`.
    pub fn from_gradient(grad: &mut impl FnMut(S) -> S, lo: S, hi: S) -> Result<Self> {
        let n = DENSITY_GRID_CELLS;
        let h = (hi - lo) / S::from_usize_lossy(n);
        let xs: Vec<S> = (0..=n)
            .map(|k| if k == n { hi } else { lo + S::from_usize_lossy(k) * h })
            .collect();
        let mut potential = Vec::with_capacity(n + 1);
        potential.push(S::zero());
        let mut g_left = grad(lo);
        for k in 0..n {
            let mid = (xs[k] + xs[k + 1]) / S::lit(2.0);
            let g_mid = grad(mid);
            let g_right = grad(xs[k + 1]);
            let step = (xs[k + 1] - xs[k]) / S::lit(6.0) * (g_left + S::lit(4.0) * g_mid + g_right);
            potential.push(potential[k] + step);
            g_left = g_right;
        }
        if potential.iter().any(|p| !p.is_finite()) {
            return Err(Error::DomainTooSmall("potential is not finite on the domain".into()));
        }
        let min = potential.iter().copied().fold(S::infinity(), S::min);
        potential.iter_mut().for_each(|p| *p = *p - min);
        let unnorm: Vec<S> = potential.iter().map(|&p| (-p).exp()).collect();
        let tail = S::lit(TAIL_FRACTION);
        if unnorm[0] > tail || unnorm[n] > tail {
            return Err(Error::DomainTooSmall(format!(
                "density at the ends of [{lo}, {hi}] is {:e} and {:e} of its maximum",
                unnorm[0].as_f64(),
                unnorm[n].as_f64()
            )));
        }
        // Trapezoidal cumulative integral: the cdf of the piecewise-linear interpolant.
        let mut cdf = Vec::with_capacity(n + 1);
        cdf.push(S::zero());
        for k in 0..n {
            let area = (xs[k + 1] - xs[k]) * (unnorm[k] + unnorm[k + 1]) / S::lit(2.0);
            cdf.push(cdf[k] + area);
        }
        let z = cdf[n];
        let density: Vec<S> = unnorm.iter().map(|&u| u / z).collect();
        cdf.iter_mut().for_each(|c| *c = *c / z);
        let mut out = Self {
            lo,
            hi,
            xs,
            potential,
            density,
            cdf,
            log_z: z.ln() - min,
            quantile_table: Vec::new(),
        };
        let m = QUANTILE_TABLE_SIZE;
        out.quantile_table = (0..m)
            .map(|j| {
                let p = (S::from_usize_lossy(j) + S::lit(0.5)) / S::from_usize_lossy(m);
                (p, out.quantile(p))
            })
            .collect();
        Ok(out)
    }

    pub fn domain(&self) -> (S, S) {
        (self.lo, self.hi)
    }

    /// `log Z` for `Φ̄` anchored so that `Φ̄(lo) = 0`.
    pub fn log_normalizer(&self) -> S {
        self.log_z
    }

    pub fn grid(&self) -> &[S] {
        &self.xs
    }

    pub fn density_values(&self) -> &[S] {
        &self.density
    }

    pub fn quantile_table(&self) -> &[(S, S)] {
        &self.quantile_table
    }

    fn locate(&self, x: S) -> Option<(usize, S)> {
        if !(x >= self.lo && x <= self.hi) {
            return None;
        }
        let k = self.xs.partition_point(|&v| v <= x).saturating_sub(1).min(self.xs.len() - 2);
        let w = (x - self.xs[k]) / (self.xs[k + 1] - self.xs[k]);
        Some((k, w))
    }

    /// `−Φ̄(x)` up to an additive constant; `−∞` outside the domain.
    pub fn unnormalized_log_density(&self, x: S) -> S {
        match self.locate(x) {
            Some((k, w)) => -(self.potential[k] + w * (self.potential[k + 1] - self.potential[k])),
            None => S::neg_infinity(),
        }
    }

    /// Normalised density, linearly interpolated; zero outside the domain.
    pub fn density(&self, x: S) -> S {
        match self.locate(x) {
            Some((k, w)) => self.density[k] + w * (self.density[k + 1] - self.density[k]),
            None => S::zero(),
        }
    }

    pub fn cdf(&self, x: S) -> S {
        if x <= self.lo {
            return S::zero();
        }
        if x >= self.hi {
            return S::one();
        }
        let (k, w) = self.locate(x).expect("inside domain");
        let h = self.xs[k + 1] - self.xs[k];
        let (d0, d1) = (self.density[k], self.density[k + 1]);
        self.cdf[k] + h * (w * d0 + w * w * (d1 - d0) / S::lit(2.0))
    }

    /// Inverse of [`cdf`](Self::cdf) by bisection on the grid and a quadratic solve in the cell.
    pub fn quantile(&self, p: S) -> S {
        if p <= S::zero() {
            return self.lo;
        }
        if p >= S::one() {
            return self.hi;
        }
        let k = self.cdf.partition_point(|&c| c < p).clamp(1, self.cdf.len() - 1) - 1;
        let h = self.xs[k + 1] - self.xs[k];
        let (d0, d1) = (self.density[k], self.density[k + 1]);
        let target = (p - self.cdf[k]) / h;
        // Solve d0·w + (d1 − d0)·w²/2 = target for w ∈ [0, 1].
        let a = (d1 - d0) / S::lit(2.0);
        let w = if a.abs() <= S::epsilon() * d0.max(d1) {
            if d0 > S::zero() {
                target / d0
            } else {
                S::lit(0.5)
            }
        } else {
            let disc = (d0 * d0 + S::lit(4.0) * a * target).max(S::zero());
            S::lit(2.0) * target / (d0 + disc.sqrt())
        };
        self.xs[k] + h * w.max(S::zero()).min(S::one())
    }

    pub fn mean(&self) -> S {
        self.moment(|x| x)
    }

    pub fn variance(&self) -> S {
        let m = self.mean();
        self.moment(|x| (x - m) * (x - m))
    }

    fn moment(&self, f: impl Fn(S) -> S) -> S {
        self.xs
            .windows(2)
            .zip(self.density.windows(2))
            .map(|(x, d)| (x[1] - x[0]) * (f(x[0]) * d[0] + f(x[1]) * d[1]) / S::lit(2.0))
            .sum()
    }

    /// Trapezoidal integral of the tabulated density (one by construction).
    pub fn total_mass(&self) -> S {
        self.moment(|_| S::one())
    }
}

/// Density of `N(mean, variance)`.
pub fn gaussian_density<S: Real>(x: S, mean: S, variance: S) -> S {
    let two_pi = S::lit(2.0 * std::f64::consts::PI);
    (-(x - mean) * (x - mean) / (S::lit(2.0) * variance)).exp() / (two_pi * variance).sqrt()
}

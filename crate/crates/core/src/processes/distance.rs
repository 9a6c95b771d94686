//! The concave distance `F(r) = ∫₀ʳ exp(−L·min(s,R)²/2)·(1 − min(s,R)/(2R)) ds`
//! used to turn the reflection coupling into a contraction.
//!
//! `F` is computed by adaptive Simpson quadrature on `[0, min(r, R)]`; beyond
//! `R` the integrand is the constant `e^{−LR²/2}/2`, so the tail is exact.

use crate::error::{invalid, Result};
use crate::scalar::Real;

/// Relative tolerance of the quadrature.
pub const F_REL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceFunction<S> {
    l: S,
    r_cut: S,
}

impl<S: Real> DistanceFunction<S> {
    pub fn new(l: S, r_cut: S) -> Result<Self> {
        if !(l >= S::zero() && l.is_finite()) {
            return invalid(format!("L must be nonnegative, got {l}"));
        }
        if !(r_cut > S::zero() && r_cut.is_finite()) {
            return invalid(format!("R must be positive, got {r_cut}"));
        }
        Ok(Self { l, r_cut })
    }

    /// `F′(s)`, non-increasing in `s`.
    pub fn derivative(&self, s: S) -> S {
        let m = s.max(S::zero()).min(self.r_cut);
        (-self.l * m * m / S::lit(2.0)).exp() * (S::one() - m / (S::lit(2.0) * self.r_cut))
    }

    pub fn eval(&self, r: S) -> S {
        if r <= S::zero() {
            return S::zero();
        }
        let inner = r.min(self.r_cut);
        let tol = S::lit(F_REL_TOL).max(S::quadrature_floor());
        let head = adaptive_simpson(|s| self.derivative(s), S::zero(), inner, tol);
        if r > self.r_cut {
            head + (r - self.r_cut) * self.derivative(self.r_cut)
        } else {
            head
        }
    }

    /// Lower comparison constant: `e^{−LR²/2}·r/2 ≤ F(r)`.
    pub fn lower_factor(&self) -> S {
        (-self.l * self.r_cut * self.r_cut / S::lit(2.0)).exp() / S::lit(2.0)
    }
}

/// `F(r)` for the given `(L, R)`.
pub fn distance_function_f<S: Real>(r: S, l: S, r_cut: S) -> Result<S> {
    if !(r >= S::zero()) {
        return invalid(format!("r must be nonnegative, got {r}"));
    }
    Ok(DistanceFunction::new(l, r_cut)?.eval(r))
}

/// Adaptive Simpson integration of a smooth integrand to relative tolerance `rel_tol`.
pub fn adaptive_simpson<S: Real>(f: impl Fn(S) -> S, a: S, b: S, rel_tol: S) -> S {
    if b <= a {
        return S::zero();
    }
    let two = S::lit(2.0);
    let (fa, fb) = (f(a), f(b));
    let m = (a + b) / two;
    let fm = f(m);
    let whole = simpson(a, b, fa, fm, fb);
    let scale = whole.abs().max(S::min_positive_value());
    recurse(&f, a, b, fa, fm, fb, whole, rel_tol * scale, 48)
}

#[inline]
fn simpson<S: Real>(a: S, b: S, fa: S, fm: S, fb: S) -> S {
    (b - a) / S::lit(6.0) * (fa + S::lit(4.0) * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn recurse<S: Real>(f: &impl Fn(S) -> S, a: S, b: S, fa: S, fm: S, fb: S, whole: S, tol: S, depth: u32) -> S {
    let two = S::lit(2.0);
    let m = (a + b) / two;
    let (lm, rm) = ((a + m) / two, (m + b) / two);
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= S::lit(15.0) * tol {
        return left + right + delta / S::lit(15.0);
    }
    recurse(f, a, m, fa, flm, fm, left, tol / two, depth - 1)
        + recurse(f, m, b, fm, frm, fb, right, tol / two, depth - 1)
}

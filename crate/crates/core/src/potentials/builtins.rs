//! Built-in potential families.

use crate::error::{invalid, Result};
use crate::scalar::Real;

use super::family::PotentialFamily;

/// Default radius declared for globally strongly convex families.
pub const QUADRATIC_DEFAULT_R: f64 = 1e-2;

/// Quadratic family with `∇Φ_i(x) = a_i (x − b_i 𝟙)`, i.e. Ornstein–Uhlenbeck
/// components with drift `a_i (b_i − x)`.
///
/// Declared constants: `L = max a_i`, `K = min a_i` and `R = 10⁻²` (strong
/// convexity holds globally, so any positive radius is valid; use
/// [`PotentialFamily::with_radius`] to pick another).
pub fn quadratic<S: Real>(a: &[S], b: &[S], dim: usize) -> Result<PotentialFamily<S>> {
    if a.is_empty() {
        return invalid("quadratic family needs at least one component");
    }
    if a.len() != b.len() {
        return invalid(format!(
            "quadratic family: {} curvatures but {} centres",
            a.len(),
            b.len()
        ));
    }
    if let Some(bad) = a.iter().find(|&&ai| !(ai > S::zero() && ai.is_finite())) {
        return invalid(format!("quadratic family curvatures must be positive, got {bad}"));
    }
    if b.iter().any(|bi| !bi.is_finite()) {
        return invalid("quadratic family centres must be finite");
    }
    let l = a.iter().fold(S::zero(), |m, &x| m.max(x));
    let k = a.iter().fold(S::infinity(), |m, &x| m.min(x));
    let (a, b) = (a.to_vec(), b.to_vec());
    PotentialFamily::new(
        "quadratic",
        a.len(),
        dim,
        (l, k, S::lit(QUADRATIC_DEFAULT_R)),
        move |i, x, out| {
            let (ai, bi) = (a[i], b[i]);
            for (o, &xj) in out.iter_mut().zip(x) {
                *o = ai * (xj - bi);
            }
        },
    )
}

/// Non-quadratic family with componentwise gradient `u − sin u`, `u = x − m_i 𝟙`.
///
/// Each coordinate derivative `1 − cos u` lies in `[0, 2]`, so `L = 2`.
/// For `‖Δx‖ ≥ R` we have `⟨Δg, Δx⟩ ≥ ‖Δx‖² − 2‖Δx‖₁ ≥ ‖Δx‖² − 2√d ‖Δx‖`,
/// which gives `K = 1/2` with `R = 4√d` (`R = 4` in one dimension).
pub fn trig<S: Real>(shifts: &[S], dim: usize) -> Result<PotentialFamily<S>> {
    if shifts.is_empty() {
        return invalid("trig family needs at least one component");
    }
    if shifts.iter().any(|m| !m.is_finite()) {
        return invalid("trig family shifts must be finite");
    }
    if dim == 0 {
        return invalid("dimension must be positive");
    }
    let shifts = shifts.to_vec();
    let r = S::lit(4.0) * S::from_usize_lossy(dim).sqrt();
    PotentialFamily::new(
        "trig",
        shifts.len(),
        dim,
        (S::lit(2.0), S::lit(0.5), r),
        move |i, x, out| {
            let m = shifts[i];
            for (o, &xj) in out.iter_mut().zip(x) {
                let u = xj - m;
                *o = u - u.sin();
            }
        },
    )
}

/// Odd derivative `Φ′` that is dissipative with `(m, b) = (1/2, 0)` but has
/// flat pieces of unbounded extent, so no `(K, R)` works for it.
///
/// `Φ′(x) = x` on `[0, 2]`; for `2ⁿ ≤ x < 2ⁿ⁺¹` (`n ≥ 1`) it equals `2ⁿ` on the
/// plateau `[2ⁿ, 2ⁿ + ln n]` and then rises linearly to `2ⁿ⁺¹`. For `n = 1`
/// the plateau is empty.
pub fn appendix_c_derivative<S: Real>() -> impl Fn(S) -> S + Clone + Send + Sync + 'static {
    |x: S| {
        if x < S::zero() {
            -positive_branch(-x)
        } else {
            positive_branch(x)
        }
    }
}

fn positive_branch<S: Real>(x: S) -> S {
    let two = S::lit(2.0);
    if x <= two || !x.is_finite() {
        return x;
    }
    let mut n = x.log2().floor();
    // log2 rounding can land one off near powers of two.
    if two.powf(n) > x {
        n = n - S::one();
    } else if two.powf(n + S::one()) <= x {
        n = n + S::one();
    }
    let base = two.powf(n);
    let plateau = n.ln();
    if x <= base + plateau {
        base
    } else {
        base / (base - plateau) * (x - base - plateau) + base
    }
}

/// Largest slope of [`appendix_c_derivative`]: `4 / (4 − ln 2)`, attained on the
/// rising piece of `n = 2`.
pub fn appendix_c_lipschitz() -> f64 {
    4.0 / (4.0 - std::f64::consts::LN_2)
}

/// [`appendix_c_derivative`] wrapped as a one-component, one-dimensional family
/// with the supplied (necessarily wrong) convexity-at-infinity claim.
pub fn appendix_c_family<S: Real>(k: S, r: S) -> Result<PotentialFamily<S>> {
    let d = appendix_c_derivative::<S>();
    PotentialFamily::new(
        "appendix_c",
        1,
        1,
        (S::lit(appendix_c_lipschitz()), k, r),
        move |_, x, out| out[0] = d(x[0]),
    )
}

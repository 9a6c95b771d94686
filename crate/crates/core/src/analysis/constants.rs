//! Closed-form constants and bounds of the error and convergence theorems.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::potentials::PotentialFamily;
use crate::scalar::{norm, Real};

/// Constants determined by `(L, K, R, d)`, the initial point and the gradients at zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Real")]
pub struct TheoremConstants<S> {
    #[serde(rename = "L")]
    pub l: S,
    #[serde(rename = "K")]
    pub k: S,
    #[serde(rename = "R")]
    pub r: S,
    pub d: usize,
    pub theta0_norm: S,
    pub mean_grad0_norm: S,
    pub sup_grad0_norm: S,
    /// Contraction rate `min{3L + 2/R², K}·e^{−LR²/2}`.
    pub c: S,
    /// Prefactor `2e^{LR²/2}`.
    #[serde(rename = "C")]
    pub big_c: S,
    /// `c/(32(L+1) + 4c)`.
    pub c_phi: S,
    #[serde(rename = "C_phi_theta0_d")]
    pub c_phi_theta0_d: S,
    #[serde(rename = "C1_phi")]
    pub c1_phi: S,
    #[serde(rename = "C1_d")]
    pub c1_d: S,
    #[serde(rename = "C_phi_lemma4")]
    pub c_phi_lemma4: S,
    /// `C_{Φ,0,d} + C1_d·C`, the prefactor of the long-time bound.
    #[serde(rename = "C_phi_d")]
    pub c_phi_d: S,
}

/// Plain and improved forms of the finite-time strong error bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Real")]
pub struct Theorem1Bound<S> {
    pub plain: S,
    pub improved: S,
}

impl<S: Real> Theorem1Bound<S> {
    /// The operative (smaller) bound.
    pub fn value(&self) -> S {
        self.plain.min(self.improved)
    }
}

/// Constants for `family` started at `theta0`.
pub fn compute_constants<S: Real>(family: &PotentialFamily<S>, theta0: &[S]) -> Result<TheoremConstants<S>> {
    if theta0.len() != family.dim() {
        return invalid(format!("theta0 has dimension {}, family has {}", theta0.len(), family.dim()));
    }
    TheoremConstants::from_parts(
        family.declared_l(),
        family.declared_k(),
        family.declared_r(),
        family.dim(),
        norm(theta0),
        family.mean_grad_norm_at_zero(),
        family.sup_grad_norm_at_zero(),
    )
}

impl<S: Real> TheoremConstants<S> {
    pub fn from_parts(
        l: S,
        k: S,
        r: S,
        d: usize,
        theta0_norm: S,
        mean_grad0_norm: S,
        sup_grad0_norm: S,
    ) -> Result<Self> {
        if !(l >= S::zero() && l.is_finite()) {
            return invalid(format!("L must be nonnegative, got {l}"));
        }
        if !(k > S::zero() && k.is_finite()) {
            return invalid(format!("K must be positive, got {k}"));
        }
        if !(r > S::zero() && r.is_finite()) {
            return invalid(format!("R must be positive, got {r}"));
        }
        if d == 0 {
            return invalid("dimension must be positive");
        }
        for (name, v) in [("theta0_norm", theta0_norm), ("mean_grad0_norm", mean_grad0_norm), ("sup_grad0_norm", sup_grad0_norm)] {
            if !(v >= S::zero() && v.is_finite()) {
                return invalid(format!("{name} must be finite and nonnegative, got {v}"));
            }
        }
        let one = S::one();
        let two = S::lit(2.0);
        let dd = S::from_usize_lossy(d);
        let half_lr2 = l * r * r / two;
        let c = (S::lit(3.0) * l + two / (r * r)).min(k) * (-half_lr2).exp();
        let big_c = two * half_lr2.exp();
        let c_phi = c / (S::lit(32.0) * (l + one) + S::lit(4.0) * c);
        let c1_phi = one + l + sup_grad0_norm;
        let prefactor = |t0: S| {
            S::lit(8.0) * (one + dd + t0 * t0 + two * mean_grad0_norm * mean_grad0_norm).sqrt() * c1_phi
        };
        let c_phi_theta0_d = prefactor(theta0_norm);
        let c_phi_lemma4 = two * (l + k) * r * r + sup_grad0_norm * sup_grad0_norm / k;
        let c1_d = (c_phi_lemma4 * dd / k).sqrt();
        let c_phi_d = prefactor(S::zero()) + c1_d * big_c;
        Ok(Self {
            l,
            k,
            r,
            d,
            theta0_norm,
            mean_grad0_norm,
            sup_grad0_norm,
            c,
            big_c,
            c_phi,
            c_phi_theta0_d,
            c1_phi,
            c1_d,
            c_phi_lemma4,
            c_phi_d,
        })
    }

    /// Second-moment bound `(‖θ₀‖² + 2t‖∇Φ̄(0)‖² + 2td)·e^{2(L+1)t}` for the Langevin diffusion.
    pub fn tilde_c(&self, t: S) -> S {
        let two = S::lit(2.0);
        let dd = S::from_usize_lossy(self.d);
        (self.theta0_norm * self.theta0_norm + two * t * self.mean_grad0_norm * self.mean_grad0_norm + two * t * dd)
            * (two * (self.l + S::one()) * t).exp()
    }

    /// Time-continuity constant `2e^{2(L+1)t}·tilde_c(t)`.
    pub fn c_lemma2(&self, t: S) -> S {
        let two = S::lit(2.0);
        two * (two * (self.l + S::one()) * t).exp() * self.tilde_c(t)
    }

    /// Strong error bound at time `t`: `C_{Φ,θ₀,d}·e^{8(1+L)t}·η^{1/4}` and
    /// the improved `C_{Φ,θ₀,d}·min(e^{8(1+L)t}·η^{1/4}, R + η^{1/4})`.
    pub fn theorem1_bound(&self, eta: S, t: S) -> Theorem1Bound<S> {
        let q = eta.powf(S::lit(0.25));
        let growth = (S::lit(8.0) * (S::one() + self.l) * t).exp() * q;
        Theorem1Bound {
            plain: self.c_phi_theta0_d * growth,
            improved: self.c_phi_theta0_d * growth.min(self.r + q),
        }
    }

    /// Exponential ergodicity bound `C·e^{−ct}·w0`.
    pub fn theorem2_bound(&self, t: S, w0: S) -> S {
        self.big_c * (-self.c * t).exp() * w0
    }

    /// Long-time bias bound `C_{Φ,d}·η^{c_Φ}`.
    pub fn theorem3_bound(&self, eta: S) -> S {
        self.c_phi_d * eta.powf(self.c_phi)
    }

    /// Triangle-inequality bound on the distance to the target at time `t`:
    /// the long-time bias plus the ergodicity term with initial distance `w0`.
    pub fn combined_bound(&self, eta: S, t: S, w0: S) -> S {
        self.theorem3_bound(eta) + self.theorem2_bound(t, w0)
    }
}

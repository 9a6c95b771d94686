use std::fmt;
use std::sync::Arc;

use crate::error::{invalid, Result};
use crate::scalar::{norm, Real};

/// Gradient callback: `(component, x, out)` writes `∇Φ_component(x)` into `out`.
pub type GradFn<S> = dyn Fn(usize, &[S], &mut [S]) + Send + Sync;

/// An indexed family of potentials `{Φ_i}` given through their gradients,
/// together with the regularity constants the user declares for it:
/// a common Lipschitz constant `L` of every `∇Φ_i` and the pair `(K, R)` of
/// convexity at infinity, uniform over the components.
///
/// Potential values are never needed by any of the dynamics, so only gradients
/// are stored.
#[derive(Clone)]
pub struct PotentialFamily<S: Real> {
    name: String,
    n_components: usize,
    dim: usize,
    grad: Arc<GradFn<S>>,
    declared_l: S,
    declared_k: S,
    declared_r: S,
    grad_norms_at_zero: Vec<S>,
}

impl<S: Real> PotentialFamily<S> {
    pub fn new<F>(
        name: impl Into<String>,
        n_components: usize,
        dim: usize,
        constants: (S, S, S),
        grad: F,
    ) -> Result<Self>
    where
        F: Fn(usize, &[S], &mut [S]) + Send + Sync + 'static,
    {
        Self::from_arc(name, n_components, dim, constants, Arc::new(grad))
    }

    pub fn from_arc(
        name: impl Into<String>,
        n_components: usize,
        dim: usize,
        (l, k, r): (S, S, S),
        grad: Arc<GradFn<S>>,
    ) -> Result<Self> {
        if n_components == 0 {
            return invalid("a family needs at least one component");
        }
        if dim == 0 {
            return invalid("dimension must be positive");
        }
        check_constants(l, k, r)?;
        let zero = vec![S::zero(); dim];
        let mut out = vec![S::zero(); dim];
        let grad_norms_at_zero = (0..n_components)
            .map(|i| {
                grad(i, &zero, &mut out);
                norm(&out)
            })
            .collect();
        Ok(Self {
            name: name.into(),
            n_components,
            dim,
            grad,
            declared_l: l,
            declared_k: k,
            declared_r: r,
            grad_norms_at_zero,
        })
    }

    /// Same gradients, different declared `(L, K, R)`.
    pub fn with_constants(&self, l: S, k: S, r: S) -> Result<Self> {
        check_constants(l, k, r)?;
        Ok(Self {
            declared_l: l,
            declared_k: k,
            declared_r: r,
            ..self.clone()
        })
    }

    pub fn with_lipschitz(&self, l: S) -> Result<Self> {
        self.with_constants(l, self.declared_k, self.declared_r)
    }

    pub fn with_radius(&self, r: S) -> Result<Self> {
        self.with_constants(self.declared_l, self.declared_k, r)
    }

    pub fn name(&self) -> &str {
        &self.name
    }
    pub fn n_components(&self) -> usize {
        self.n_components
    }
    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn declared_l(&self) -> S {
        self.declared_l
    }
    pub fn declared_k(&self) -> S {
        self.declared_k
    }
    pub fn declared_r(&self) -> S {
        self.declared_r
    }
    pub fn grad_norms_at_zero(&self) -> &[S] {
        &self.grad_norms_at_zero
    }

    /// `sup_i ‖∇Φ_i(0)‖`.
    pub fn sup_grad_norm_at_zero(&self) -> S {
        self.grad_norms_at_zero
            .iter()
            .fold(S::zero(), |m, &g| m.max(g))
    }

    /// `‖∇Φ̄(0)‖`.
    pub fn mean_grad_norm_at_zero(&self) -> S {
        norm(&self.mean_gradient(&vec![S::zero(); self.dim]))
    }

    #[inline]
    pub fn grad_into(&self, component: usize, x: &[S], out: &mut [S]) {
        debug_assert!(component < self.n_components);
        debug_assert_eq!(x.len(), self.dim);
        (self.grad)(component, x, out)
    }

    pub fn grad(&self, component: usize, x: &[S]) -> Vec<S> {
        let mut out = vec![S::zero(); self.dim];
        self.grad_into(component, x, &mut out);
        out
    }

    /// `∇Φ̄(x) = (1/N) Σ_i ∇Φ_i(x)` written into `out`; `scratch` must have
    /// length `dim`. With a single component this is exactly `∇Φ_0(x)`.
    pub fn mean_gradient_into(&self, x: &[S], out: &mut [S], scratch: &mut [S]) {
        if self.n_components == 1 {
            self.grad_into(0, x, out);
            return;
        }
        out.iter_mut().for_each(|o| *o = S::zero());
        for i in 0..self.n_components {
            self.grad_into(i, x, scratch);
            for (o, &g) in out.iter_mut().zip(scratch.iter()) {
                *o = *o + g;
            }
        }
        let n = S::from_usize_lossy(self.n_components);
        out.iter_mut().for_each(|o| *o = *o / n);
    }

    pub fn mean_gradient(&self, x: &[S]) -> Vec<S> {
        let mut out = vec![S::zero(); self.dim];
        let mut scratch = vec![S::zero(); self.dim];
        self.mean_gradient_into(x, &mut out, &mut scratch);
        out
    }
}

fn check_constants<S: Real>(l: S, k: S, r: S) -> Result<()> {
    if !(l >= S::zero() && l.is_finite()) {
        return invalid(format!("declared L must be finite and nonnegative, got {l}"));
    }
    if !(k > S::zero() && k.is_finite()) {
        return invalid(format!("declared K must be finite and positive, got {k}"));
    }
    if !(r > S::zero() && r.is_finite()) {
        return invalid(format!("declared R must be finite and positive, got {r}"));
    }
    Ok(())
}

impl<S: Real> fmt::Debug for PotentialFamily<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PotentialFamily")
            .field("name", &self.name)
            .field("n_components", &self.n_components)
            .field("dim", &self.dim)
            .field("declared_l", &self.declared_l)
            .field("declared_k", &self.declared_k)
            .field("declared_r", &self.declared_r)
            .field("grad_norms_at_zero", &self.grad_norms_at_zero)
            .finish()
    }
}
